/** Client view state mirroring the server session.
 *
 * Navigation is a stack: zooming into a cluster pushes the current frame
 * (viewport transform and selection snapshot); zooming out pops and
 * restores both.  A monotone request token discards stale layout
 * responses that arrive after a newer request was issued.
 */
export const DEFAULT_VIEWPORT = { x: 0, y: 0, k: 1 };
export class ViewState {
    stack = [];
    nodeId;
    viewport = { ...DEFAULT_VIEWPORT };
    selection = new Set();
    filters = {};
    comparison = [];
    requestCounter = 0;
    latestRequest = 0;
    constructor(rootId = "0") {
        this.nodeId = rootId;
    }
    get depth() {
        return this.stack.length;
    }
    beginRequest() {
        this.latestRequest = ++this.requestCounter;
        return this.latestRequest;
    }
    /** Only the most recently issued request may apply its response. */
    acceptResponse(token) {
        return token === this.latestRequest;
    }
    zoomInto(nodeId) {
        this.stack.push({
            nodeId: this.nodeId,
            viewport: { ...this.viewport },
            selection: [...this.selection],
        });
        this.nodeId = nodeId;
        this.viewport = { ...DEFAULT_VIEWPORT };
    }
    zoomOut() {
        const frame = this.stack.pop();
        if (!frame)
            return null;
        this.nodeId = frame.nodeId;
        this.viewport = { ...frame.viewport };
        this.selection = new Set(frame.selection);
        return frame;
    }
    setSelection(ids) {
        this.selection = new Set(ids);
    }
    setFilters(ranges) {
        this.filters = { ...ranges };
    }
    setComparison(ids) {
        this.comparison = [...ids];
    }
    pan(dx, dy) {
        this.viewport = { ...this.viewport, x: this.viewport.x + dx, y: this.viewport.y + dy };
    }
    scale(factor) {
        this.viewport = { ...this.viewport, k: this.viewport.k * factor };
    }
}
