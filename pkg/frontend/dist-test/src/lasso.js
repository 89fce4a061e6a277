/** Lasso gesture capture.
 *
 * Collects pointer positions in layout coordinates and produces the
 * polygon sent to the server; the client never decides which circles are
 * inside, that is the server's call on authoritative coordinates.
 */
export class LassoTool {
    points = [];
    active = false;
    start(x, y) {
        this.active = true;
        this.points = [[x, y]];
    }
    extend(x, y, minStep = 0.05) {
        if (!this.active)
            return;
        const last = this.points[this.points.length - 1];
        if (Math.hypot(x - last[0], y - last[1]) >= minStep) {
            this.points.push([x, y]);
        }
    }
    /** Close the gesture; returns the polygon or null when degenerate. */
    finish() {
        this.active = false;
        const polygon = this.points;
        this.points = [];
        return polygon.length >= 3 ? polygon : null;
    }
    cancel() {
        this.active = false;
        this.points = [];
    }
    path() {
        return [...this.points];
    }
}
