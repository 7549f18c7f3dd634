// Contract tests: every recorded QueryResponse fixture renders without
// client errors, the timing switch shows exactly the recorded values, and
// the operator tree mirrors the fixture's structure node for node.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { countRankLabels, renderMap } from "../src/map.js";
import { applyResponse, initialState, shownTiming, timingSwitchEnabled, toggleTiming } from "../src/state.js";
import { nodeCount, renderOperatorTree } from "../src/tree.js";
import { renderHelp, renderPlanText, renderTable, renderTiming, renderTrace } from "../src/trace.js";
import type { QueryResponse, TreeNode } from "../src/types.js";

const FIXTURES = dirname(fileURLToPath(import.meta.url)) + "/../fixtures";

function fixture(name: string): QueryResponse {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8"));
}

const SUCCESS = ["success_join.json", "knn_result.json"];
const ERRORS = ["error_entity.json", "error_syntax.json", "error_unsupported.json"];

describe("recorded fixtures render without client errors", () => {
  for (const name of SUCCESS) {
    it(`renders success fixture ${name}`, () => {
      const doc = fixture(name);
      expect(doc.error).toBeUndefined();
      const trace = renderTrace(doc.trace!);
      const plan = renderPlanText(doc.plan_text!);
      const table = renderTable(doc.results!);
      const map = renderMap(doc.results!.geojson, doc.trace!.query_type);
      const tree = renderOperatorTree(doc.operator_tree!);
      for (const html of [trace, plan, table, map, tree]) {
        expect(html.length).toBeGreaterThan(0);
      }
      expect(map).toContain("<svg");
      expect(table).toContain("<table");
    });
  }

  for (const name of ERRORS) {
    it(`renders error fixture ${name} into the help flow`, () => {
      const doc = fixture(name);
      expect(doc.results).toBeUndefined();
      const html = renderHelp(doc.error!);
      expect(html).toContain(doc.error!.category);
      for (const suggestion of doc.error!.suggestions) {
        expect(html).toContain(suggestion.replace(/&/g, "&amp;").replace(/</g, "&lt;"));
      }
      const state = applyResponse(initialState(), doc);
      expect(state.panel).toBe("help");
    });
  }
});

describe("timing switch", () => {
  it("shows exactly the two recorded values, unmodified", () => {
    const doc = fixture("success_join.json");
    const timing = doc.timing!;
    expect(timing.optimized_ms).not.toBeNull();

    let state = applyResponse({ ...initialState(), timingMode: "optimized" as const }, doc);
    expect(timingSwitchEnabled(state)).toBe(true);
    expect(shownTiming(state)).toBe(timing.optimized_ms);
    state = toggleTiming(state);
    expect(shownTiming(state)).toBe(timing.baseline_ms);
    state = toggleTiming(state);
    expect(shownTiming(state)).toBe(timing.optimized_ms);

    const optimizedHtml = renderTiming(timing, "optimized", true);
    expect(optimizedHtml).toContain(`${timing.optimized_ms} ms`);
    const baselineHtml = renderTiming(timing, "baseline", true);
    expect(baselineHtml).toContain(`${timing.baseline_ms} ms`);
  });

  it("is disabled when only the baseline was measured", () => {
    const doc = fixture("knn_result.json");
    expect(doc.timing!.optimized_ms).toBeNull();
    const state = applyResponse(initialState(), doc);
    expect(timingSwitchEnabled(state)).toBe(false);
    expect(shownTiming(state)).toBe(doc.timing!.baseline_ms);
    const unchanged = toggleTiming(state);
    expect(unchanged.timingMode).toBe(state.timingMode);
  });
});

describe("operator tree", () => {
  it("node count equals the fixture tree size", () => {
    for (const name of SUCCESS) {
      const doc = fixture(name);
      const tree = doc.operator_tree!;
      const html = renderOperatorTree(tree);
      const rendered = (html.match(/class="op-(node|leaf)"/g) ?? []).length;
      expect(rendered).toBe(nodeCount(tree));
    }
  });

  it("q2 plan is the four-operator chain from the template", () => {
    const doc = fixture("knn_result.json");
    const kinds: string[] = [];
    let node: TreeNode | undefined = doc.operator_tree!;
    while (node) {
      kinds.push(node.kind);
      node = node.children[0];
    }
    expect(kinds).toEqual(["consume", "knearest", "filter", "feed"]);
  });

  it("join plan is a binary node with two leaves", () => {
    const doc = fixture("success_join.json");
    const join = doc.operator_tree!.children[0];
    expect(join.kind).toBe("spatialjoin");
    expect(join.children.length).toBe(2);
  });
});

describe("map rendering", () => {
  it("draws ranked knn connecting lines", () => {
    const doc = fixture("knn_result.json");
    const svg = renderMap(doc.results!.geojson, "NearestNeighbor");
    const links = doc.results!.geojson.features.filter((f) => f.properties["link"]);
    expect(links.length).toBeGreaterThan(0);
    expect(countRankLabels(svg)).toBe(links.length);
    expect((svg.match(/class="knn-link"/g) ?? []).length).toBe(links.length);
  });

  it("renders the empty collection as a notice", () => {
    const html = renderMap({ type: "FeatureCollection", features: [] }, null);
    expect(html).toContain("no results");
    expect(html).not.toContain("<svg");
  });

  it("renders polygons as filled paths", () => {
    const doc = fixture("success_join.json");
    const svg = renderMap(doc.results!.geojson, "Join");
    expect(svg).toContain("<path");
    expect(svg).toContain("fill-opacity");
  });

  it("escapes hostile property text", () => {
    const svg = renderMap({
      type: "FeatureCollection",
      features: [{
        type: "Feature",
        geometry: { type: "Point", coordinates: [1, 2] },
        properties: { name: "<script>alert(1)</script>" },
      }],
    }, null);
    expect(svg).not.toContain("<script>");
  });
});
