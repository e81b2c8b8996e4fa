/** Shapes returned by the midi-draw HTTP API. */
export {};
