/** Client view state mirroring the server session.
 *
 * Navigation is a stack: zooming into a cluster pushes the current frame
 * (viewport transform and selection snapshot); zooming out pops and
 * restores both.  A monotone request token discards stale layout
 * responses that arrive after a newer request was issued.
 */

export interface Viewport {
  x: number;
  y: number;
  k: number;
}

interface Frame {
  nodeId: string;
  viewport: Viewport;
  selection: number[];
}

export const DEFAULT_VIEWPORT: Viewport = { x: 0, y: 0, k: 1 };

export class ViewState {
  private stack: Frame[] = [];
  nodeId: string;
  viewport: Viewport = { ...DEFAULT_VIEWPORT };
  selection = new Set<number>();
  filters: Record<string, [number, number]> = {};
  comparison: number[] = [];
  private requestCounter = 0;
  private latestRequest = 0;

  constructor(rootId: string = "0") {
    this.nodeId = rootId;
  }

  get depth(): number {
    return this.stack.length;
  }

  beginRequest(): number {
    this.latestRequest = ++this.requestCounter;
    return this.latestRequest;
  }

  /** Only the most recently issued request may apply its response. */
  acceptResponse(token: number): boolean {
    return token === this.latestRequest;
  }

  zoomInto(nodeId: string): void {
    this.stack.push({
      nodeId: this.nodeId,
      viewport: { ...this.viewport },
      selection: [...this.selection],
    });
    this.nodeId = nodeId;
    this.viewport = { ...DEFAULT_VIEWPORT };
  }

  zoomOut(): Frame | null {
    const frame = this.stack.pop();
    if (!frame) return null;
    this.nodeId = frame.nodeId;
    this.viewport = { ...frame.viewport };
    this.selection = new Set(frame.selection);
    return frame;
  }

  setSelection(ids: number[]): void {
    this.selection = new Set(ids);
  }

  setFilters(ranges: Record<string, [number, number]>): void {
    this.filters = { ...ranges };
  }

  setComparison(ids: number[]): void {
    this.comparison = [...ids];
  }

  pan(dx: number, dy: number): void {
    this.viewport = { ...this.viewport, x: this.viewport.x + dx, y: this.viewport.y + dy };
  }

  scale(factor: number): void {
    this.viewport = { ...this.viewport, k: this.viewport.k * factor };
  }
}
