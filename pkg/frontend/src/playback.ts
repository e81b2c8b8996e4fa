import type { Note } from "./types.js";

export interface ScheduledNote {
    freq: number;
    start: number;
    dur: number;
}

export function midiToFreq(pitch: number): number {
    return 440 * Math.pow(2, (pitch - 69) / 12);
}

/**
 * Map grid notes to wall-clock seconds. Steps are eighth notes, so at the
 * default 120 BPM each step lasts 0.25s and a 16-step melody spans 4s.
 */
export function schedule(notes: Note[], bpm = 120): ScheduledNote[] {
    const step = 60 / bpm / 2;
    return notes.map((n) => ({
        freq: midiToFreq(n.pitch),
        start: n.start * step,
        dur: n.dur * step,
    }));
}

export function totalDuration(sched: ScheduledNote[]): number {
    return sched.reduce((end, n) => Math.max(end, n.start + n.dur), 0);
}

/** Plays scheduled notes with plain oscillators; no-ops without WebAudio. */
export class Player {
    private ctx: AudioContext | null = null;
    private playing: OscillatorNode[] = [];

    available(): boolean {
        return typeof AudioContext !== "undefined";
    }

    play(notes: Note[], bpm = 120): void {
        if (!this.available()) return;
        if (!this.ctx) this.ctx = new AudioContext();
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

    stop(): void {
        for (const osc of this.playing) {
            try {
                osc.stop();
            } catch {
                // already stopped
            }
        }
        this.playing = [];
    }
}
