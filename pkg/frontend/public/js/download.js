export function decodeBase64(b64) {
    const bin = atob(b64);
    const bytes = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++)
        bytes[i] = bin.charCodeAt(i);
    return bytes;
}
/** Trigger a browser download of raw MIDI bytes. */
export function downloadMidi(bytes, filename = "melody.mid", doc = document) {
    const blob = new Blob([bytes.buffer], { type: "audio/midi" });
    const url = URL.createObjectURL(blob);
    const a = doc.createElement("a");
    a.href = url;
    a.download = filename;
    a.click();
    URL.revokeObjectURL(url);
}
