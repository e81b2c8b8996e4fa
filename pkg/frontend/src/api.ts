import type { ContourResponse, GenerateResponse, Point } from "./types.js";

export interface GenerateParams {
    points: Point[];
    width: number;
    height: number;
    candidates: number;
    temperature: number;
    seed?: number;
}

/**
 * Thin wrapper over the midi-draw HTTP API. The fetch function is
 * injectable so tests can run without a server.
 */
export class ApiClient {
    private fetchFn: typeof fetch;

    constructor(fetchFn?: typeof fetch) {
        this.fetchFn = fetchFn ?? fetch.bind(globalThis);
    }

    private async post<T>(path: string, body: unknown): Promise<T> {
        const resp = await this.fetchFn(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        const payload = await resp.json();
        if (!resp.ok) {
            const msg =
                payload && typeof payload.error === "string"
                    ? payload.error
                    : `request failed with status ${resp.status}`;
            throw new Error(msg);
        }
        return payload as T;
    }

    contour(points: Point[], width: number, height: number): Promise<ContourResponse> {
        return this.post<ContourResponse>("/api/contour", { points, width, height });
    }

    generate(params: GenerateParams): Promise<GenerateResponse> {
        const body: Record<string, unknown> = {
            points: params.points,
            width: params.width,
            height: params.height,
            candidates: params.candidates,
            temperature: params.temperature,
        };
        if (params.seed !== undefined) body.seed = params.seed;
        return this.post<GenerateResponse>("/api/generate", body);
    }
}
