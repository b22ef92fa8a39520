export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
async function request(base, path, init) {
    const resp = await fetch(base + path, init);
    const body = await resp.json();
    if (!resp.ok) {
        const err = body.error ?? { code: "unknown", message: "request failed" };
        throw new ApiError(resp.status, err.code, err.message);
    }
    return body;
}
/** Typed client for the explorer service. */
export class Client {
    constructor(base = "") {
        this.base = base;
    }
    meta() {
        return request(this.base, "/api/meta");
    }
    global(color) {
        return request(this.base, `/api/global?color=${encodeURIComponent(color)}`);
    }
    attributions() {
        return request(this.base, "/api/attributions");
    }
    tour(req) {
        return request(this.base, "/api/tour", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
    }
    observation(i) {
        return request(this.base, `/api/obs/${i}`);
    }
    selection(indices) {
        return request(this.base, "/api/selection", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ indices }),
        });
    }
}
