// Mirrors the session API view object exactly; the client never computes
// legality or verdicts on its own.

export interface ViewNode {
  id: string;
  path: number[];
  kind: string; // "leaf" or a connective token: & | %& %| $& $| !& !|
  children?: string[];
  text?: string;
  active?: number;
  chosen?: number | null;
  abandoned: boolean;
}

export interface ViewState {
  id: string;
  formula: string;
  human: string; // "M" | "E"
  tree: ViewNode[];
  moves: string[];
  legal: string[];
  finished: boolean;
  winner: string | null;
  budget_left: number;
}

export interface CreateRequest {
  formula: string;
  interpretation?: Record<string, string | boolean>;
  budget?: number;
  mode?: "auto" | "work" | "counterwork";
}
