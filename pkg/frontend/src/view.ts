// Pure rendering of a session view into HTML.  Every fact shown here comes
// straight from the server view: actives, chosen components, abandonment,
// legal moves and the verdict.

import type { ViewNode, ViewState } from "./types.js";

const KIND_SYMBOLS: Record<string, string> = {
  "&": "∧",
  "|": "∨",
  "%&": "∧⃒", // toggling: wedge with a vertical overlay
  "%|": "∨⃒",
  "$&": "▵",
  "$|": "▿",
  "!&": "⊓",
  "!|": "⊔",
};

export function kindSymbol(kind: string): string {
  return KIND_SYMBOLS[kind] ?? kind;
}

function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function byId(view: ViewState): Map<string, ViewNode> {
  return new Map(view.tree.map((node) => [node.id, node]));
}

function renderNode(
  node: ViewNode,
  nodes: Map<string, ViewNode>,
  dimmed: boolean,
): string {
  const dim = dimmed || node.abandoned;
  const classes = ["node", `kind-${node.kind === "leaf" ? "leaf" : "op"}`];
  if (dim) classes.push("abandoned");
  if (node.kind === "leaf") {
    return `<span class="${classes.join(" ")}" data-node="${node.id}">` +
      `${escapeHtml(node.text ?? "?")}</span>`;
  }
  const children = node.children ?? [];
  const parts = children.map((childId, index) => {
    const child = nodes.get(childId);
    if (!child) return "";
    const marks: string[] = [];
    if (node.active !== undefined && node.active === index + 1) {
      marks.push("active");
    }
    if (node.chosen != null && node.chosen === index + 1) {
      marks.push("chosen");
    }
    return `<li class="${marks.join(" ")}">${renderNode(child, nodes, dim)}</li>`;
  });
  const label = `<span class="op-label" data-node="${node.id}">` +
    `${escapeHtml(kindSymbol(node.kind))}</span>`;
  return `<div class="${classes.join(" ")}" data-node="${node.id}">` +
    `${label}<ul>${parts.join("")}</ul></div>`;
}

export function renderTree(view: ViewState): string {
  const nodes = byId(view);
  const root = nodes.get("root");
  if (!root) return "<p>empty view</p>";
  return renderNode(root, nodes, false);
}

export function renderMoves(view: ViewState): string {
  if (view.finished) return "";
  const buttons = view.legal.map(
    (move) =>
      `<button class="move-btn" data-move="${escapeHtml(move)}">${escapeHtml(move)}</button>`,
  );
  buttons.push(`<button class="move-btn pass" data-move="pass">pass</button>`);
  return `<div class="moves">${buttons.join(" ")}</div>`;
}

export function renderStatus(view: ViewState): string {
  const log = view.moves.map((m) => `<code>${escapeHtml(m)}</code>`).join(" ");
  const who = view.human === "E" ? "environment" : "machine";
  let banner = `<p>you play the <b>${who}</b>; budget left ${view.budget_left}</p>`;
  if (view.finished) {
    const winner = view.winner === "M" ? "machine" : "environment";
    banner = `<p class="banner winner-${view.winner}">finished — winner: <b>${winner}</b></p>`;
  }
  return `${banner}<p class="log">moves: ${log || "(none)"}</p>`;
}

export function render(view: ViewState): string {
  return (
    `<div class="session" data-session="${view.id}">` +
    `<h2><code>${escapeHtml(view.formula)}</code></h2>` +
    renderStatus(view) +
    renderTree(view) +
    renderMoves(view) +
    `</div>`
  );
}

export function renderError(detail: string): string {
  return `<div class="error banner">${escapeHtml(detail)}</div>`;
}
