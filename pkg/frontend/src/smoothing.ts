import type { Point } from "./types.js";

/**
 * Centered moving average over a polyline. The window is clamped at the
 * ends, so the first and last points average over fewer neighbours instead
 * of shrinking the stroke.
 */
export function movingAverage(points: Point[], window = 5): Point[] {
    if (window < 1 || window % 2 === 0) {
        throw new Error(`window must be odd and positive, got ${window}`);
    }
    const half = (window - 1) / 2;
    const out: Point[] = [];
    for (let i = 0; i < points.length; i++) {
        const lo = Math.max(0, i - half);
        const hi = Math.min(points.length - 1, i + half);
        let sx = 0;
        let sy = 0;
        for (let j = lo; j <= hi; j++) {
            sx += points[j][0];
            sy += points[j][1];
        }
        const n = hi - lo + 1;
        out.push([sx / n, sy / n]);
    }
    return out;
}
