/**
 * Typed client for the exploration API.
 *
 * All geometry decisions (lasso hit-testing, quantiles) are made by the
 * server; this client only moves payloads and never re-derives them.
 */
export class ApiError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    base;
    fetchImpl;
    constructor(base = "", fetchImpl = (url, init) => fetch(url, init)) {
        this.base = base;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        const response = await this.fetchImpl(this.base + path, init);
        const body = await response.json();
        if (!response.ok) {
            throw new ApiError(response.status, body?.message ?? response.statusText);
        }
        return body;
    }
    space() {
        return this.request("/api/space");
    }
    layout(cluster, level) {
        const params = new URLSearchParams();
        if (cluster !== undefined)
            params.set("cluster", cluster);
        if (level !== undefined)
            params.set("level", String(level));
        const qs = params.toString();
        return this.request(`/api/layout${qs ? "?" + qs : ""}`);
    }
    select(body) {
        return this.request("/api/select", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }
    filter(ranges) {
        return this.request("/api/filter", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(ranges),
        });
    }
    compare(ids) {
        return this.request(`/api/compare?ids=${ids.join(",")}`);
    }
    searchTrace(run) {
        return this.request(`/api/search/trace?run=${encodeURIComponent(run)}`);
    }
}
