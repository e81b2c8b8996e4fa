/** Shapes returned by the midi-draw HTTP API. */

export type Point = [number, number];

export interface FitEntry {
    k: number;
    rmse: number;
}

export interface ContourResponse {
    series: number[];
    components: number[];
    curve: number[];
    fit: FitEntry[];
}

export interface Note {
    pitch: number;
    start: number;
    dur: number;
}

export interface GenerateResponse {
    seed: number;
    notes: Note[];
    curve: number[];
    components: number[];
    fit_mse: number;
    candidate_mses: number[];
    midi_base64: string;
}
