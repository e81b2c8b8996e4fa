export const PITCH_LOW = 48;
export const PITCH_HIGH = 83;
/** One cell per note on a 16-step grid spanning the model's pitch range. */
export function layoutNotes(notes, width, height, pitchLow = PITCH_LOW, pitchHigh = PITCH_HIGH) {
    const steps = 16;
    const rows = pitchHigh - pitchLow + 1;
    const w = width / steps;
    const h = height / rows;
    return notes.map((n) => ({
        pitch: n.pitch,
        start: n.start,
        x: n.start * w,
        y: (pitchHigh - n.pitch) * h,
        w: w * n.dur,
        h,
    }));
}
/**
 * The target curve is zero-mean in pitch units; anchor it at the mean pitch
 * of the generated notes so it lands on the same axes as the cells.
 */
export function curvePoints(curve, meanPitch, width, height, pitchLow = PITCH_LOW, pitchHigh = PITCH_HIGH) {
    const rows = pitchHigh - pitchLow + 1;
    const w = width / curve.length;
    const h = height / rows;
    return curve.map((v, t) => {
        const pitch = v + meanPitch;
        return [t * w + w / 2, (pitchHigh - pitch) * h + h / 2];
    });
}
export function drawPianoRoll(canvas, notes, curve) {
    const ctx = canvas.getContext("2d");
    if (!ctx)
        return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#1b1e26";
    ctx.fillRect(0, 0, width, height);
    // step grid
    ctx.strokeStyle = "#2a2f3a";
    ctx.lineWidth = 1;
    for (let i = 1; i < 16; i++) {
        const x = (i * width) / 16;
        ctx.beginPath();
        ctx.moveTo(x, 0);
        ctx.lineTo(x, height);
        ctx.stroke();
    }
    if (notes.length === 0)
        return;
    for (const cell of layoutNotes(notes, width, height)) {
        ctx.fillStyle = "#5fb376";
        ctx.fillRect(cell.x + 1, cell.y, cell.w - 2, Math.max(cell.h, 2));
    }
    if (curve && curve.length > 0) {
        const meanPitch = notes.reduce((s, n) => s + n.pitch, 0) / notes.length;
        const pts = curvePoints(curve, meanPitch, width, height);
        ctx.strokeStyle = "#f2a541";
        ctx.lineWidth = 2;
        ctx.beginPath();
        pts.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.stroke();
    }
}
