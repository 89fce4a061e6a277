/** Lasso gesture capture.
 *
 * Collects pointer positions in layout coordinates and produces the
 * polygon sent to the server; the client never decides which circles are
 * inside, that is the server's call on authoritative coordinates.
 */

export class LassoTool {
  private points: [number, number][] = [];
  active = false;

  start(x: number, y: number): void {
    this.active = true;
    this.points = [[x, y]];
  }

  extend(x: number, y: number, minStep = 0.05): void {
    if (!this.active) return;
    const last = this.points[this.points.length - 1];
    if (Math.hypot(x - last[0], y - last[1]) >= minStep) {
      this.points.push([x, y]);
    }
  }

  /** Close the gesture; returns the polygon or null when degenerate. */
  finish(): [number, number][] | null {
    this.active = false;
    const polygon = this.points;
    this.points = [];
    return polygon.length >= 3 ? polygon : null;
  }

  cancel(): void {
    this.active = false;
    this.points = [];
  }

  path(): [number, number][] {
    return [...this.points];
  }
}
