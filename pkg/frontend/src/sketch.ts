import { movingAverage } from "./smoothing.js";
import type { ContourResponse, Point } from "./types.js";

/**
 * Pure state for the drawing surface: the raw stroke being captured plus
 * the last analysed contour. Rendering and network calls live elsewhere so
 * this can be tested without a DOM.
 */
export class SketchState {
    points: Point[] = [];
    drawing = false;
    contour: ContourResponse | null = null;

    beginStroke(x: number, y: number): void {
        // A new press discards the previous stroke and its analysis.
        this.points = [[x, y]];
        this.contour = null;
        this.drawing = true;
    }

    extendStroke(x: number, y: number): void {
        if (!this.drawing) return;
        this.points.push([x, y]);
    }

    endStroke(): void {
        this.drawing = false;
    }

    /** A contour needs at least two points to define a direction. */
    canAnalyze(): boolean {
        return !this.drawing && this.points.length >= 2;
    }

    /** Stroke with jitter knocked down, ready to send to the server. */
    smoothed(): Point[] {
        return movingAverage(this.points, 5);
    }

    setContour(resp: ContourResponse): void {
        this.contour = resp;
    }
}
