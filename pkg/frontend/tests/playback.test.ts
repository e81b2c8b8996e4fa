import { describe, expect, it } from "vitest";
import { midiToFreq, schedule, totalDuration } from "../src/playback.js";
import type { Note } from "../src/types.js";

function gridMelody(pitches: number[]): Note[] {
    return pitches.map((p, i) => ({ pitch: p, start: i, dur: 1 }));
}

describe("midiToFreq", () => {
    it("hits the reference pitches", () => {
        expect(midiToFreq(69)).toBeCloseTo(440, 10);
        expect(midiToFreq(81)).toBeCloseTo(880, 10);
        expect(midiToFreq(57)).toBeCloseTo(220, 10);
        expect(midiToFreq(60)).toBeCloseTo(261.6255653, 5);
    });

    it("is monotone in pitch", () => {
        for (let p = 48; p < 83; p++) {
            expect(midiToFreq(p + 1)).toBeGreaterThan(midiToFreq(p));
        }
    });
});

describe("schedule", () => {
    it("spaces sixteen eighth notes a quarter second apart at 120 BPM", () => {
        const notes = gridMelody(Array.from({ length: 16 }, (_, i) => 60 + (i % 5)));
        const sched = schedule(notes);
        expect(sched).toHaveLength(16);
        sched.forEach((n, i) => {
            expect(n.start).toBeCloseTo(i * 0.25, 12);
            expect(n.dur).toBeCloseTo(0.25, 12);
        });
        expect(totalDuration(sched)).toBeCloseTo(4.0, 12);
    });

    it("scales with tempo", () => {
        const notes = gridMelody([60, 62, 64, 65]);
        const sched = schedule(notes, 240);
        expect(sched[1].start).toBeCloseTo(0.125, 12);
        expect(totalDuration(sched)).toBeCloseTo(0.5, 12);
    });

    it("converts pitches through midiToFreq", () => {
        const sched = schedule(gridMelody([69]));
        expect(sched[0].freq).toBeCloseTo(440, 10);
    });

    it("handles an empty melody", () => {
        expect(schedule([])).toEqual([]);
        expect(totalDuration([])).toBe(0);
    });
});
