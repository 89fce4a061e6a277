import { test } from "node:test";
import assert from "node:assert/strict";
import { PLACEHOLDER_COLOR, accuracyColor, colorClass, darkestGreen, } from "../src/color.js";
test("top 1% quantile maps to the darkest class", () => {
    assert.equal(accuracyColor(0.99), darkestGreen());
    assert.equal(accuracyColor(1.0), darkestGreen());
    assert.notEqual(accuracyColor(0.989), darkestGreen());
});
test("classes are monotone in the quantile", () => {
    const quantiles = [0, 0.2, 0.4, 0.6, 0.8, 0.99];
    const classes = quantiles.map((q) => colorClass(q));
    for (let i = 1; i < classes.length; i++) {
        assert.ok(classes[i] >= classes[i - 1]);
    }
    assert.equal(classes[classes.length - 1], 5);
});
test("missing metrics render the placeholder", () => {
    assert.equal(accuracyColor(undefined), PLACEHOLDER_COLOR);
    assert.equal(colorClass(undefined), null);
});
test("quantiles below the top threshold never reach the top class", () => {
    for (let q = 0; q < 0.99; q += 0.005) {
        assert.ok(colorClass(q) < 5, `quantile ${q}`);
    }
});
