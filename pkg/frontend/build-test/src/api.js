// Thin typed client over the service API. fetch is injectable so the
// view-model tests can run without a server.
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
async function parse(response) {
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
        const message = body.error ?? response.statusText;
        throw new ApiError(response.status, message);
    }
    return body;
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    url(path) {
        return this.baseUrl + path;
    }
    document() {
        return this.fetchFn(this.url("/api/document")).then((r) => parse(r));
    }
    widget(id) {
        return this.fetchFn(this.url(`/api/widgets/${id}`)).then((r) => parse(r));
    }
    trace(selector) {
        return this.fetchFn(this.url(`/api/trace/${encodeURIComponent(selector)}`))
            .then((r) => parse(r));
    }
    track(type, value) {
        const query = `type=${encodeURIComponent(type)}&value=${encodeURIComponent(value)}`;
        return this.fetchFn(this.url(`/api/track?${query}`)).then((r) => parse(r));
    }
    check() {
        return this.fetchFn(this.url("/api/check"), { method: "POST" }).then((r) => parse(r));
    }
    patchDisclosure(widgetId, revision, edit) {
        return this.fetchFn(this.url(`/api/widgets/${widgetId}/disclosure`), {
            method: "PATCH",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ revision, ...edit }),
        }).then((r) => parse(r));
    }
    save() {
        return this.fetchFn(this.url("/api/save"), { method: "POST" }).then((r) => parse(r));
    }
}
