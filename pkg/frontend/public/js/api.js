/**
 * Thin wrapper over the midi-draw HTTP API. The fetch function is
 * injectable so tests can run without a server.
 */
export class ApiClient {
    constructor(fetchFn) {
        this.fetchFn = fetchFn ?? fetch.bind(globalThis);
    }
    async post(path, body) {
        const resp = await this.fetchFn(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        const payload = await resp.json();
        if (!resp.ok) {
            const msg = payload && typeof payload.error === "string"
                ? payload.error
                : `request failed with status ${resp.status}`;
            throw new Error(msg);
        }
        return payload;
    }
    contour(points, width, height) {
        return this.post("/api/contour", { points, width, height });
    }
    generate(params) {
        const body = {
            points: params.points,
            width: params.width,
            height: params.height,
            candidates: params.candidates,
            temperature: params.temperature,
        };
        if (params.seed !== undefined)
            body.seed = params.seed;
        return this.post("/api/generate", body);
    }
}
