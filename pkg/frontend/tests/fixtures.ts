// A view captured from the play service right after creating a session on
// the two-toggling worked example; the machine has already made its
// opening switch M:2.1.

import type { ViewState } from "../src/types.js";

export const FRESH_VIEW: ViewState = {
  id: "fixture01",
  formula: "((p %& ~p) | (q %& ~q)) | ((~p | ~q) %| (p & q))",
  human: "E",
  tree: [
    { id: "root", path: [], kind: "|", children: ["1", "2"], abandoned: false },
    { id: "1", path: [1], kind: "|", children: ["1.1", "1.2"], abandoned: false },
    { id: "1.1", path: [1, 1], kind: "%&", children: ["1.1.1", "1.1.2"], active: 1, abandoned: false },
    { id: "1.1.1", path: [1, 1, 1], kind: "leaf", text: "p", abandoned: false },
    { id: "1.1.2", path: [1, 1, 2], kind: "leaf", text: "~p", abandoned: false },
    { id: "1.2", path: [1, 2], kind: "%&", children: ["1.2.1", "1.2.2"], active: 1, abandoned: false },
    { id: "1.2.1", path: [1, 2, 1], kind: "leaf", text: "q", abandoned: false },
    { id: "1.2.2", path: [1, 2, 2], kind: "leaf", text: "~q", abandoned: false },
    { id: "2", path: [2], kind: "%|", children: ["2.1", "2.2"], active: 1, abandoned: false },
    { id: "2.1", path: [2, 1], kind: "|", children: ["2.1.1", "2.1.2"], abandoned: false },
    { id: "2.1.1", path: [2, 1, 1], kind: "leaf", text: "~p", abandoned: false },
    { id: "2.1.2", path: [2, 1, 2], kind: "leaf", text: "~q", abandoned: false },
    { id: "2.2", path: [2, 2], kind: "&", children: ["2.2.1", "2.2.2"], abandoned: false },
    { id: "2.2.1", path: [2, 2, 1], kind: "leaf", text: "p", abandoned: false },
    { id: "2.2.2", path: [2, 2, 2], kind: "leaf", text: "q", abandoned: false },
  ],
  moves: ["M:2.1"],
  legal: ["1.1.1", "1.1.2", "1.2.1", "1.2.2"],
  finished: false,
  winner: null,
  budget_left: 199,
};

export const SEQ_VIEW: ViewState = {
  id: "fixture02",
  formula: "a $| b $| c",
  human: "E",
  tree: [
    { id: "root", path: [], kind: "$|", children: ["1", "2", "3"], active: 1, abandoned: false },
    { id: "1", path: [1], kind: "leaf", text: "a", abandoned: false },
    { id: "2", path: [2], kind: "leaf", text: "b", abandoned: false },
    { id: "3", path: [3], kind: "leaf", text: "c", abandoned: false },
  ],
  moves: [],
  legal: [],
  finished: false,
  winner: null,
  budget_left: 50,
};

export const CHOSEN_VIEW: ViewState = {
  id: "fixture03",
  formula: "p !& q",
  human: "E",
  tree: [
    { id: "root", path: [], kind: "!&", children: ["1", "2"], chosen: 2, abandoned: false },
    { id: "1", path: [1], kind: "leaf", text: "p", abandoned: true },
    { id: "2", path: [2], kind: "leaf", text: "q", abandoned: false },
  ],
  moves: ["E:2"],
  legal: [],
  finished: true,
  winner: "M",
  budget_left: 40,
};
