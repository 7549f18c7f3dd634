// Operator tree view: nested <details> elements mirror the JSON exactly,
// which makes every node natively collapsible without any script.

import { esc } from "./map.js";
import type { TreeNode } from "./types.js";

export function nodeCount(node: TreeNode): number {
  return 1 + node.children.reduce((acc, child) => acc + nodeCount(child), 0);
}

function paramsOf(node: TreeNode): string {
  const skip = new Set(["kind", "children"]);
  const parts: string[] = [];
  for (const [key, value] of Object.entries(node)) {
    if (skip.has(key)) continue;
    parts.push(`${esc(key)}=${esc(JSON.stringify(value))}`);
  }
  return parts.join(" ");
}

export function renderOperatorTree(node: TreeNode): string {
  const params = paramsOf(node);
  const label =
    `<span class="op-kind">${esc(node.kind)}</span>` +
    (params ? ` <span class="op-params">${params}</span>` : "");
  if (node.children.length === 0) {
    return `<div class="op-leaf">${label}</div>`;
  }
  const children = node.children.map(renderOperatorTree).join("");
  return `<details open class="op-node"><summary>${label}</summary>` +
    `<div class="op-children">${children}</div></details>`;
}
