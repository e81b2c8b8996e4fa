import { movingAverage } from "./smoothing.js";
/**
 * Pure state for the drawing surface: the raw stroke being captured plus
 * the last analysed contour. Rendering and network calls live elsewhere so
 * this can be tested without a DOM.
 */
export class SketchState {
    constructor() {
        this.points = [];
        this.drawing = false;
        this.contour = null;
    }
    beginStroke(x, y) {
        // A new press discards the previous stroke and its analysis.
        this.points = [[x, y]];
        this.contour = null;
        this.drawing = true;
    }
    extendStroke(x, y) {
        if (!this.drawing)
            return;
        this.points.push([x, y]);
    }
    endStroke() {
        this.drawing = false;
    }
    /** A contour needs at least two points to define a direction. */
    canAnalyze() {
        return !this.drawing && this.points.length >= 2;
    }
    /** Stroke with jitter knocked down, ready to send to the server. */
    smoothed() {
        return movingAverage(this.points, 5);
    }
    setContour(resp) {
        this.contour = resp;
    }
}
