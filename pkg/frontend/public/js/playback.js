export function midiToFreq(pitch) {
    return 440 * Math.pow(2, (pitch - 69) / 12);
}
/**
 * Map grid notes to wall-clock seconds. Steps are eighth notes, so at the
 * default 120 BPM each step lasts 0.25s and a 16-step melody spans 4s.
 */
export function schedule(notes, bpm = 120) {
    const step = 60 / bpm / 2;
    return notes.map((n) => ({
        freq: midiToFreq(n.pitch),
        start: n.start * step,
        dur: n.dur * step,
    }));
}
export function totalDuration(sched) {
    return sched.reduce((end, n) => Math.max(end, n.start + n.dur), 0);
}
/** Plays scheduled notes with plain oscillators; no-ops without WebAudio. */
export class Player {
    constructor() {
        this.ctx = null;
        this.playing = [];
    }
    available() {
        return typeof AudioContext !== "undefined";
    }
    play(notes, bpm = 120) {
        if (!this.available())
            return;
        if (!this.ctx)
            this.ctx = new AudioContext();
        this.stop();
        const now = this.ctx.currentTime + 0.05;
        for (const n of schedule(notes, bpm)) {
            const osc = this.ctx.createOscillator();
            const gain = this.ctx.createGain();
            osc.type = "triangle";
            osc.frequency.value = n.freq;
            // short attack/release to avoid clicks at note boundaries
            gain.gain.setValueAtTime(0, now + n.start);
            gain.gain.linearRampToValueAtTime(0.22, now + n.start + 0.01);
            gain.gain.setValueAtTime(0.22, now + n.start + n.dur - 0.03);
            gain.gain.linearRampToValueAtTime(0, now + n.start + n.dur);
            osc.connect(gain).connect(this.ctx.destination);
            osc.start(now + n.start);
            osc.stop(now + n.start + n.dur);
            this.playing.push(osc);
        }
    }
    stop() {
        for (const osc of this.playing) {
            try {
                osc.stop();
            }
            catch {
                // already stopped
            }
        }
        this.playing = [];
    }
}
