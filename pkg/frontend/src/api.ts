/**
 * Typed client for the exploration API.
 *
 * All geometry decisions (lasso hit-testing, quantiles) are made by the
 * server; this client only moves payloads and never re-derives them.
 */

export interface OpInfo {
  id: number;
  name: string;
  kind: string;
}

export interface Histogram {
  edges: number[];
  counts: number[];
}

export interface SpaceSummary {
  family: string;
  size: number;
  sampled: number;
  ops: OpInfo[];
  histograms: Record<string, Histogram>;
  views: string[];
  slots?: number;
  skeleton?: [number, number][];
}

export interface LayoutCell {
  arch_id: number;
  member: number;
  q: number;
  r: number;
  x: number;
  y: number;
  accuracy?: number;
  accuracy_quantile?: number;
}

export interface LayoutGlyph {
  arch_id: number;
  member: number;
  cells: [number, number][];
  label_anchor: [number, number];
  op_ratios: Record<string, number>;
}

export interface LayoutCluster {
  id: string;
  center: [number, number];
  objective: number;
  cells: LayoutCell[];
  glyphs: LayoutGlyph[];
}

export interface LayoutView {
  node_id: string;
  level: number;
  parent_id: string | null;
  anchor: [number, number];
  scale: number;
  clusters: LayoutCluster[];
  effective_selection: number[];
}

export interface SelectResponse {
  selected: number[];
  effective_selection: number[];
}

export interface FilterResponse {
  surviving: number[];
  effective_selection: number[];
}

export interface CompareRow {
  arch_id: number;
  accuracy?: number;
  params?: number;
  flops?: number;
  train_time?: number;
  accuracy_quantile?: number;
}

export interface StructureNode {
  id: number;
  role: string;
  op?: string;
  kind?: string;
}

export interface StructureEdge {
  source: number;
  target: number;
  slot?: number;
  op?: string;
  kind?: string;
}

export interface Structure {
  nodes: StructureNode[];
  edges: StructureEdge[];
  degenerate: boolean;
}

export interface ComparePayload {
  rows: CompareRow[];
  pcp: { axes: string[]; vectors: Record<string, number[]> };
  structures: Record<string, Structure>;
}

export type SelectBody =
  | { ids: number[] }
  | { cluster: string }
  | { lasso: [number, number][]; view: string };

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body?.message ?? response.statusText);
    }
    return body as T;
  }

  space(): Promise<SpaceSummary> {
    return this.request("/api/space");
  }

  layout(cluster?: string, level?: number): Promise<LayoutView> {
    const params = new URLSearchParams();
    if (cluster !== undefined) params.set("cluster", cluster);
    if (level !== undefined) params.set("level", String(level));
    const qs = params.toString();
    return this.request(`/api/layout${qs ? "?" + qs : ""}`);
  }

  select(body: SelectBody): Promise<SelectResponse> {
    return this.request("/api/select", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  filter(ranges: Record<string, [number, number]>): Promise<FilterResponse> {
    return this.request("/api/filter", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(ranges),
    });
  }

  compare(ids: number[]): Promise<ComparePayload> {
    return this.request(`/api/compare?ids=${ids.join(",")}`);
  }

  searchTrace(run: string): Promise<Record<string, unknown>> {
    return this.request(`/api/search/trace?run=${encodeURIComponent(run)}`);
  }
}
