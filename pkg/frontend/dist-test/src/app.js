/** Explorer wiring: gestures to API calls to state to SVG.
 *
 * Every selection-defining gesture round-trips through the API; responses
 * arriving after a newer request are discarded via the state's token.
 */
import { ApiError } from "./api.js";
import { clear, svgElement, toast } from "./dom.js";
import { arcPath, layoutStructure, opColor } from "./glyphs.js";
import { LassoTool } from "./lasso.js";
import { renderOverview } from "./overview.js";
import { brushedIds, composeWithFilters, polylines } from "./pcp.js";
import { ViewState } from "./state.js";
import { TABLE_COLUMNS, buildTable } from "./table.js";
export class Explorer {
    api;
    svg;
    panels;
    state = new ViewState("0");
    lasso = new LassoTool();
    view = null;
    structures = new Map();
    brushes = {};
    surviving = [];
    sortBy = "accuracy";
    constructor(api, svg, panels) {
        this.api = api;
        this.svg = svg;
        this.panels = panels;
    }
    async start() {
        await this.loadView(this.state.nodeId);
    }
    async loadView(nodeId) {
        const token = this.state.beginRequest();
        try {
            const view = await this.api.layout(nodeId);
            if (!this.state.acceptResponse(token))
                return; // stale
            this.view = view;
            this.render();
        }
        catch (err) {
            this.report(err);
        }
    }
    async zoomInto(nodeId) {
        this.state.zoomInto(nodeId);
        await this.loadView(nodeId);
    }
    async zoomOut() {
        const frame = this.state.zoomOut();
        if (!frame)
            return;
        try {
            // the server selection is restored alongside the viewport
            await this.api.select({ ids: [...this.state.selection] });
        }
        catch (err) {
            this.report(err);
        }
        await this.loadView(this.state.nodeId);
    }
    async applyLasso() {
        const polygon = this.lasso.finish();
        if (!polygon || !this.view)
            return;
        try {
            const out = await this.api.select({ lasso: polygon, view: this.view.node_id });
            this.state.setSelection(out.selected);
            this.render();
            await this.loadComparison(out.selected);
        }
        catch (err) {
            this.report(err);
        }
    }
    async selectCluster(clusterId) {
        try {
            const out = await this.api.select({ cluster: clusterId });
            this.state.setSelection(out.selected);
            this.render();
            await this.loadComparison(out.selected);
        }
        catch (err) {
            this.report(err);
        }
    }
    async applyFilters(ranges) {
        try {
            const out = await this.api.filter(ranges);
            this.state.setFilters(ranges);
            this.surviving = out.surviving;
            this.render();
        }
        catch (err) {
            this.report(err);
        }
    }
    setBrush(axis, range) {
        if (range === null)
            delete this.brushes[axis];
        else
            this.brushes[axis] = range;
        this.renderComparison();
    }
    sortTable(column) {
        this.sortBy = column;
        this.renderComparison();
    }
    comparison = null;
    async loadComparison(ids) {
        if (!ids.length) {
            this.comparison = null;
            this.renderComparison();
            return;
        }
        try {
            this.comparison = await this.api.compare(ids);
            for (const [id, structure] of Object.entries(this.comparison.structures)) {
                this.structures.set(Number(id), structure);
            }
            this.state.setComparison(ids);
            this.renderComparison();
        }
        catch (err) {
            this.report(err);
        }
    }
    render() {
        if (!this.view)
            return;
        clear(this.svg);
        const root = svgElement("g", {
            transform: `translate(${this.state.viewport.x} ${this.state.viewport.y}) scale(${this.state.viewport.k})`,
        });
        this.svg.appendChild(root);
        const shapes = renderOverview(this.view, this.state.selection, this.state.viewport.k);
        for (const shape of shapes) {
            if (shape.kind === "circle") {
                const el = svgElement("circle", {
                    cx: shape.x,
                    cy: shape.y,
                    r: shape.r,
                    fill: shape.fill,
                });
                if (shape.stroke) {
                    el.setAttribute("stroke", shape.stroke);
                    el.setAttribute("stroke-width", "0.12");
                }
                el.addEventListener("dblclick", () => {
                    if (this.view?.clusters.some((c) => c.id === shape.clusterId)) {
                        void this.zoomInto(shape.clusterId);
                    }
                });
                root.appendChild(el);
            }
            else if (shape.kind === "ring") {
                for (const arc of shape.arcs) {
                    root.appendChild(svgElement("path", {
                        d: arcPath(arc, shape.x, shape.y),
                        fill: opColor(arc.op),
                    }));
                }
            }
            else if (shape.kind === "leader") {
                root.appendChild(svgElement("line", {
                    x1: shape.x1,
                    y1: shape.y1,
                    x2: shape.x2,
                    y2: shape.y2,
                    stroke: "#999999",
                    "stroke-width": 0.05,
                }));
            }
            else {
                const structure = this.structures.get(shape.archId);
                if (structure)
                    this.drawStructure(root, structure, shape.x, shape.y, 0.05);
            }
        }
    }
    drawStructure(host, structure, x, y, scale) {
        const layout = layoutStructure(structure);
        const g = svgElement("g", { transform: `translate(${x} ${y}) scale(${scale})` });
        for (const edge of layout.edges) {
            g.appendChild(svgElement("line", {
                x1: edge.x1,
                y1: edge.y1,
                x2: edge.x2,
                y2: edge.y2,
                stroke: edge.color,
                "stroke-width": 3,
            }));
        }
        for (const node of layout.nodes) {
            g.appendChild(svgElement("circle", { cx: node.x, cy: node.y, r: 5, fill: "#333333" }));
        }
        host.appendChild(g);
    }
    renderComparison() {
        const { pcp, table, structures } = this.panels;
        clear(pcp);
        clear(table);
        clear(structures);
        if (!this.comparison)
            return;
        const visible = composeWithFilters(brushedIds(this.comparison.pcp, this.brushes), this.surviving.length ? this.surviving : this.comparison.rows.map((r) => r.arch_id));
        const lines = polylines(this.comparison.pcp).filter((l) => visible.includes(l.archId));
        const pcpSvg = svgElement("svg", { viewBox: "0 0 420 120", width: 420, height: 120 });
        for (const line of lines) {
            const points = line.points
                .map(([i, t]) => `${20 + i * 120},${110 - t * 100}`)
                .join(" ");
            pcpSvg.appendChild(svgElement("polyline", { points, fill: "none", stroke: "#31a354", "stroke-width": 1 }));
        }
        pcp.appendChild(pcpSvg);
        const rows = buildTable(this.comparison.rows, this.sortBy);
        const tbl = document.createElement("table");
        const head = tbl.insertRow();
        head.insertCell().textContent = "arch";
        for (const column of TABLE_COLUMNS) {
            const cell = head.insertCell();
            cell.textContent = column;
            cell.addEventListener("click", () => this.sortTable(column));
        }
        for (const row of rows) {
            const tr = tbl.insertRow();
            tr.insertCell().textContent = String(row.archId);
            for (const column of TABLE_COLUMNS) {
                const cell = tr.insertCell();
                const data = row.cells[column];
                cell.textContent = data.value === null ? "-" : data.value.toPrecision(4);
                cell.style.background = `linear-gradient(90deg, #c7e9c0 ${data.bar * 100}%, transparent 0)`;
            }
        }
        table.appendChild(tbl);
        for (const id of this.state.comparison) {
            const structure = this.structures.get(id);
            if (!structure)
                continue;
            const holder = document.createElement("div");
            holder.className = "structure-card";
            const svg = svgElement("svg", { viewBox: "-10 -10 140 80", width: 140, height: 80 });
            this.drawStructure(svg, structure, 0, 10, 1);
            holder.appendChild(svg);
            structures.appendChild(holder);
        }
    }
    report(err) {
        const message = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
        toast(message, this.panels.toastHost);
    }
}
