/**
 * Lay out one bar per truncation order. Bar heights scale against the
 * largest rmse in the set; k=3 is flagged because that is the order the
 * generator actually conditions on.
 */
export function layoutFitBars(fit, width, height, pad = 24) {
    const innerW = width - 2 * pad;
    const innerH = height - 2 * pad;
    const n = fit.length;
    if (n === 0)
        return [];
    const maxRmse = Math.max(...fit.map((f) => f.rmse));
    const slot = innerW / n;
    const barW = slot * 0.7;
    return fit.map((f, i) => {
        const frac = maxRmse > 0 ? f.rmse / maxRmse : 0;
        const h = frac * innerH;
        return {
            k: f.k,
            rmse: f.rmse,
            x: pad + i * slot + (slot - barW) / 2,
            y: pad + (innerH - h),
            w: barW,
            h,
            highlighted: f.k === 3,
        };
    });
}
export function drawFitGraph(canvas, fit) {
    const ctx = canvas.getContext("2d");
    if (!ctx)
        return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#1b1e26";
    ctx.fillRect(0, 0, width, height);
    const bars = layoutFitBars(fit, width, height);
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    for (const bar of bars) {
        ctx.fillStyle = bar.highlighted ? "#f2a541" : "#4d6daa";
        ctx.fillRect(bar.x, bar.y, bar.w, bar.h);
        ctx.fillStyle = "#aab2c0";
        ctx.fillText(String(bar.k), bar.x + bar.w / 2, height - 8);
    }
    ctx.fillStyle = "#aab2c0";
    ctx.textAlign = "left";
    ctx.fillText("rmse by components kept", 8, 14);
}
