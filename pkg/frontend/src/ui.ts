// View rendering: labeled-glyph placeholder art for every state and react.
// No react action is ever attached to a react, so a react-to-react envelope
// is unreachable from the interface.

import {
  NotificationPayload,
  QUICK_REACTS,
  REACTS,
  REACT_GLYPHS,
  ReactName,
  STATE_GLYPHS,
  StateListBody,
  StateName,
  labelOf,
} from "./protocol.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function glyphCard(glyph: string, label: string, className: string): HTMLElement {
  const card = el("button", className);
  card.append(el("span", "glyph", glyph), el("span", "label", label));
  return card;
}

/** Scrollable carousel of the current shareable states; tap to send. */
export function renderStateCarousel(
  list: StateListBody,
  onTap: (state: StateName) => void,
): HTMLElement {
  const root = el("div", "state-carousel");
  if (list.sensed) {
    const badge = el("span", "sensed-badge", "❤ sensed");
    badge.title = "states suggested from your heart rate";
    root.append(badge);
  }
  const row = el("div", "state-row");
  for (const state of list.states) {
    const card = glyphCard(STATE_GLYPHS[state], labelOf(state), "state-card");
    card.dataset.state = state;
    card.addEventListener("click", () => onTap(state));
    row.append(card);
  }
  root.append(row);
  return root;
}

export interface NotificationHandlers {
  onQuickReact: (shareId: string, react: ReactName) => void;
  onOpenState: (shareId: string) => void;
  onDismissState: (shareId: string) => void;
  onShareSuggestion: (state: StateName) => void;
  onDismissSuggestion: () => void;
  onOpenReact: (reactId: string) => void;
}

/** One notification toast; content depends on the kind. */
export function renderNotification(
  n: NotificationPayload,
  handlers: NotificationHandlers,
): HTMLElement {
  const root = el("div", `notification ${n.kind}`);
  if (n.kind === "partner_state_visit" && n.state && n.ref) {
    const ref = n.ref;
    root.append(el("span", "title", "your partner's otter is visiting"));
    const icon = glyphCard(STATE_GLYPHS[n.state], labelOf(n.state), "notif-icon");
    icon.addEventListener("click", () => handlers.onOpenState(ref));
    root.append(icon);
    const quickRow = el("div", "quick-reacts");
    for (const react of n.quick_reacts ?? QUICK_REACTS) {
      const btn = glyphCard(REACT_GLYPHS[react], labelOf(react), "quick-react-btn");
      btn.dataset.react = react;
      btn.addEventListener("click", () => handlers.onQuickReact(ref, react));
      quickRow.append(btn);
    }
    root.append(quickRow);
    const dismiss = el("button", "dismiss-btn", "Dismiss");
    dismiss.addEventListener("click", () => handlers.onDismissState(ref));
    root.append(dismiss);
  } else if (n.kind === "own_state_suggestion" && n.state) {
    const state = n.state;
    root.append(el("span", "title", "Message from your otter"));
    root.append(glyphCard(STATE_GLYPHS[state], labelOf(state), "notif-icon"));
    if (n.sensed_badge) {
      root.append(el("span", "sensed-badge", "❤ sensed"));
    }
    const share = el("button", "share-btn", "Share");
    share.addEventListener("click", () => handlers.onShareSuggestion(state));
    const dismiss = el("button", "dismiss-btn", "Dismiss");
    dismiss.addEventListener("click", () => handlers.onDismissSuggestion());
    root.append(share, dismiss);
  } else if (n.kind === "partner_react" && n.react && n.ref) {
    const ref = n.ref;
    root.append(el("span", "title", "your partner reacted"));
    const icon = glyphCard(REACT_GLYPHS[n.react], labelOf(n.react), "notif-icon");
    icon.addEventListener("click", () => handlers.onOpenReact(ref));
    root.append(icon);
    // Deliberately no react buttons here: reacts cannot be reacted to.
  }
  return root;
}

/** All 14 reacts in table order, plus "Don't react": 15 entries. */
export function renderReactCarousel(
  shareId: string,
  onPick: (shareId: string, react: ReactName) => void,
  onDontReact: (shareId: string) => void,
): HTMLElement {
  const root = el("div", "react-carousel");
  for (const react of REACTS) {
    const card = glyphCard(REACT_GLYPHS[react], labelOf(react), "react-card");
    card.dataset.react = react;
    card.addEventListener("click", () => onPick(shareId, react));
    root.append(card);
  }
  const dont = el("button", "react-card dont-react", "Don't react");
  dont.addEventListener("click", () => onDontReact(shareId));
  root.append(dont);
  return root;
}

export interface HistoryEntryView {
  direction: "sent" | "received";
  kind: "state" | "react";
  state?: StateName;
  react?: ReactName;
}

/** Pair history; a react renders beside the state it answered. */
export function renderHistory(entries: HistoryEntryView[]): HTMLElement {
  const root = el("ul", "history");
  for (const entry of entries) {
    const item = el("li", `history-entry ${entry.direction} ${entry.kind}`);
    if (entry.kind === "state" && entry.state) {
      item.append(el("span", "glyph", STATE_GLYPHS[entry.state]));
      item.append(el("span", "label", labelOf(entry.state)));
    } else if (entry.kind === "react" && entry.react) {
      item.append(el("span", "glyph react-glyph", REACT_GLYPHS[entry.react]));
      item.append(el("span", "label", labelOf(entry.react)));
      if (entry.state) {
        item.append(el("span", "re-label", "re:"));
        item.append(el("span", "glyph referenced-state", STATE_GLYPHS[entry.state]));
      }
    }
    root.append(item);
  }
  return root;
}
