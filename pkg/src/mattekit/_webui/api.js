/**
 * Typed client for the review service JSON API. The client never caches
 * or transforms server state beyond shaping records into views; every
 * mutation goes through the decision endpoint.
 */
export class ApiError extends Error {
    httpStatus;
    constructor(message, httpStatus) {
        super(message);
        this.httpStatus = httpStatus;
    }
}
async function parseError(response) {
    let message = `HTTP ${response.status}`;
    try {
        const body = (await response.json());
        if (body.error)
            message = body.error;
    }
    catch {
        // non-JSON error body: keep the status text
    }
    throw new ApiError(message, response.status);
}
export class ApiClient {
    baseUrl;
    fetchFn;
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    imageUrl(id, kind) {
        return `${this.baseUrl}/api/samples/${encodeURIComponent(id)}/image?kind=${kind}`;
    }
    toView(record) {
        return {
            id: record.id,
            status: record.status,
            screening: record.screening,
            decidedBy: record.decided_by,
            images: {
                rgb: this.imageUrl(record.id, "rgb"),
                alpha: this.imageUrl(record.id, "alpha"),
                inverse: this.imageUrl(record.id, "inverse"),
            },
        };
    }
    async listSamples(status, offset, limit) {
        const filter = status ? `status=${status}&` : "";
        const response = await this.fetchFn(`${this.baseUrl}/api/samples?${filter}offset=${offset}&limit=${limit}`);
        if (!response.ok)
            await parseError(response);
        const records = (await response.json());
        return records.map((r) => this.toView(r));
    }
    async decide(id, decision) {
        const response = await this.fetchFn(`${this.baseUrl}/api/samples/${encodeURIComponent(id)}/decision`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ decision }),
        });
        if (!response.ok)
            await parseError(response);
        return (await response.json());
    }
    async stats() {
        const response = await this.fetchFn(`${this.baseUrl}/api/stats`);
        if (!response.ok)
            await parseError(response);
        return (await response.json());
    }
}
