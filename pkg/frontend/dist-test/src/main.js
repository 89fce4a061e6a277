/** Browser bootstrap: instantiate the explorer against the local API and
 * wire the toolbar, lasso gestures and scented filter widgets. */
import { ApiClient } from "./api.js";
import { Explorer } from "./app.js";
import { makeWidget, setRange, toRanges } from "./filters.js";
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
async function boot() {
    const api = new ApiClient("");
    const svg = el("overview").querySelector("svg");
    const explorer = new Explorer(api, svg, {
        pcp: el("pcp"),
        table: el("table-panel"),
        structures: el("structures"),
        toastHost: el("toasts"),
    });
    await explorer.start();
    el("zoom-out").addEventListener("click", () => void explorer.zoomOut());
    const space = await api.space();
    const widgetHost = el("filters");
    let widgets = Object.entries(space.histograms).map(([attr, hist]) => makeWidget(attr, hist));
    const renderWidgets = () => {
        widgetHost.textContent = "";
        widgets.forEach((widget, index) => {
            const box = document.createElement("div");
            box.className = "widget";
            const title = document.createElement("div");
            title.textContent = widget.attribute;
            box.appendChild(title);
            const bars = document.createElement("div");
            bars.className = "bars";
            for (const height of widget.bars) {
                const bar = document.createElement("span");
                bar.style.height = `${4 + height * 28}px`;
                bars.appendChild(bar);
            }
            box.appendChild(bars);
            for (const [which, value] of [["lo", widget.range[0]], ["hi", widget.range[1]]]) {
                const input = document.createElement("input");
                input.type = "number";
                input.step = "any";
                input.value = String(value);
                input.addEventListener("change", () => {
                    const lo = which === "lo" ? Number(input.value) : widget.range[0];
                    const hi = which === "hi" ? Number(input.value) : widget.range[1];
                    widgets = widgets.map((w, i) => (i === index ? setRange(w, lo, hi) : w));
                    void explorer.applyFilters(toRanges(widgets));
                    renderWidgets();
                });
                box.appendChild(input);
            }
            widgetHost.appendChild(box);
        });
    };
    renderWidgets();
}
boot().catch((err) => {
    console.error(err);
    document.body.insertAdjacentText("beforeend", String(err));
});
