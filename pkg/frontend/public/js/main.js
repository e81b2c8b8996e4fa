import { ApiClient } from "./api.js";
import { downloadMidi, decodeBase64 } from "./download.js";
import { drawFitGraph } from "./fitGraph.js";
import { drawPianoRoll, PITCH_HIGH, PITCH_LOW } from "./pianoroll.js";
import { Player } from "./playback.js";
import { SketchState } from "./sketch.js";
const state = new SketchState();
const api = new ApiClient();
const player = new Player();
const sketchCanvas = document.getElementById("sketch");
const fitCanvas = document.getElementById("fitgraph");
const rollCanvas = document.getElementById("pianoroll");
const generateBtn = document.getElementById("generate");
const regenerateBtn = document.getElementById("regenerate");
const playBtn = document.getElementById("play");
const stopBtn = document.getElementById("stop");
const downloadBtn = document.getElementById("download");
const tempSlider = document.getElementById("temperature");
const tempValue = document.getElementById("temperature-value");
const candidatesSel = document.getElementById("candidates");
const seedOut = document.getElementById("seed");
const statusEl = document.getElementById("status");
let lastResult = null;
let inFlight = false;
function setStatus(msg, isError = false) {
    statusEl.textContent = msg;
    statusEl.className = isError ? "status error" : "status";
}
function canvasPos(e) {
    const rect = sketchCanvas.getBoundingClientRect();
    const x = ((e.clientX - rect.left) / rect.width) * sketchCanvas.width;
    const y = ((e.clientY - rect.top) / rect.height) * sketchCanvas.height;
    return [x, y];
}
function pitchToY(pitch) {
    const frac = (pitch - PITCH_LOW) / (PITCH_HIGH - PITCH_LOW);
    return (1 - frac) * sketchCanvas.height;
}
function redrawSketch() {
    const ctx = sketchCanvas.getContext("2d");
    if (!ctx)
        return;
    const { width, height } = sketchCanvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#1b1e26";
    ctx.fillRect(0, 0, width, height);
    if (state.points.length > 1) {
        ctx.strokeStyle = "#e5e9f0";
        ctx.lineWidth = 2;
        ctx.lineJoin = "round";
        ctx.beginPath();
        state.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.stroke();
    }
    else if (state.points.length === 0) {
        ctx.fillStyle = "#5a6270";
        ctx.font = "14px sans-serif";
        ctx.fillText("draw a melody contour here", 16, height / 2);
    }
    // overlay the 3-component reconstruction the model will aim for
    const contour = state.contour;
    if (contour) {
        const mean = contour.series.reduce((a, b) => a + b, 0) / contour.series.length;
        const w = width / contour.curve.length;
        ctx.strokeStyle = "#f2a541";
        ctx.lineWidth = 2;
        ctx.beginPath();
        contour.curve.forEach((v, t) => {
            const x = t * w + w / 2;
            const y = pitchToY(v + mean);
            t === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
        });
        ctx.stroke();
    }
}
function syncButtons() {
    generateBtn.disabled = inFlight || state.contour === null;
    regenerateBtn.disabled = inFlight || lastResult === null;
    playBtn.disabled = lastResult === null;
    stopBtn.disabled = lastResult === null;
    downloadBtn.disabled = lastResult === null;
}
async function analyzeStroke() {
    if (!state.canAnalyze()) {
        setStatus("draw a longer stroke (need at least two points)", true);
        return;
    }
    setStatus("analyzing stroke…");
    try {
        const resp = await api.contour(state.smoothed(), sketchCanvas.width, sketchCanvas.height);
        state.setContour(resp);
        redrawSketch();
        drawFitGraph(fitCanvas, resp.fit);
        const [a, b, c] = resp.components;
        setStatus(`components [${a.toFixed(2)}, ${b.toFixed(2)}, ${c.toFixed(2)}] — ready to generate`);
    }
    catch (err) {
        setStatus(`contour analysis failed: ${err.message}`, true);
    }
    syncButtons();
}
async function runGenerate(seed) {
    if (inFlight || state.contour === null)
        return;
    inFlight = true;
    syncButtons();
    setStatus("generating…");
    try {
        const resp = await api.generate({
            points: state.smoothed(),
            width: sketchCanvas.width,
            height: sketchCanvas.height,
            candidates: Number(candidatesSel.value),
            temperature: Number(tempSlider.value),
            seed,
        });
        lastResult = resp;
        seedOut.textContent = String(resp.seed);
        drawPianoRoll(rollCanvas, resp.notes, resp.curve);
        setStatus(`picked candidate with fit mse ${resp.fit_mse.toFixed(3)} (seed ${resp.seed})`);
    }
    catch (err) {
        setStatus(`generation failed: ${err.message}`, true);
    }
    inFlight = false;
    syncButtons();
}
sketchCanvas.addEventListener("pointerdown", (e) => {
    sketchCanvas.setPointerCapture(e.pointerId);
    state.beginStroke(...canvasPos(e));
    redrawSketch();
    syncButtons();
});
sketchCanvas.addEventListener("pointermove", (e) => {
    if (!state.drawing)
        return;
    state.extendStroke(...canvasPos(e));
    redrawSketch();
});
sketchCanvas.addEventListener("pointerup", () => {
    state.endStroke();
    void analyzeStroke();
});
sketchCanvas.addEventListener("pointercancel", () => {
    state.endStroke();
    syncButtons();
});
generateBtn.addEventListener("click", () => void runGenerate());
regenerateBtn.addEventListener("click", () => {
    // replay with the stored seed: same request, same melody
    if (lastResult)
        void runGenerate(lastResult.seed);
});
playBtn.addEventListener("click", () => {
    if (!lastResult)
        return;
    if (!player.available()) {
        setStatus("audio is not available in this browser; download the MIDI instead", true);
        return;
    }
    player.play(lastResult.notes);
});
stopBtn.addEventListener("click", () => player.stop());
downloadBtn.addEventListener("click", () => {
    if (!lastResult)
        return;
    downloadMidi(decodeBase64(lastResult.midi_base64), `melody-${lastResult.seed}.mid`);
});
tempSlider.addEventListener("input", () => {
    tempValue.textContent = Number(tempSlider.value).toFixed(2);
});
tempValue.textContent = Number(tempSlider.value).toFixed(2);
redrawSketch();
drawPianoRoll(rollCanvas, [], null);
syncButtons();
setStatus("draw a contour to get started");
