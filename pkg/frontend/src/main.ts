// Single-page client. Configuration comes from the URL query:
//   index.html?server=ws://127.0.0.1:7476&token=...&name=me&partner=u2
// Without a token it registers a fresh user and shows the token so the
// partner device can pair.

import { NotificationPayload, ReactName, StateName } from "./protocol.js";
import { ClientSession } from "./state.js";
import { Connection, WsTransport } from "./socket.js";
import {
  NotificationHandlers,
  renderHistory,
  renderNotification,
  renderReactCarousel,
  renderStateCarousel,
} from "./ui.js";

function query(name: string): string | null {
  return new URL(window.location.href).searchParams.get(name);
}

export function buildApp(session: ClientSession, root: HTMLElement): void {
  const header = document.createElement("header");
  const title = document.createElement("h1");
  title.textContent = "otterlink";
  const who = document.createElement("span");
  who.className = "whoami";
  header.append(title, who);

  const notifArea = document.createElement("div");
  notifArea.className = "notifications";
  const listArea = document.createElement("div");
  listArea.className = "list-area";
  const reactArea = document.createElement("div");
  reactArea.className = "react-area";
  const historyArea = document.createElement("div");
  historyArea.className = "history-area";
  root.append(header, notifArea, listArea, reactArea, historyArea);

  const provenance = () =>
    session.currentList?.mode === "sensing_on" ? "sensed_list" : "random_list";

  const openReactCarousel = (shareId: string) => {
    reactArea.replaceChildren(
      renderReactCarousel(
        shareId,
        (id, react: ReactName) => {
          void session.sendReact(id, react, "in_app").catch(console.warn);
          reactArea.replaceChildren();
        },
        (id) => {
          void session.dontReact(id).catch(console.warn);
          reactArea.replaceChildren();
        },
      ),
    );
  };

  const handlers = (n: NotificationPayload): NotificationHandlers => ({
    onQuickReact: (shareId, react) => {
      void session.sendReact(shareId, react, "quick").catch(console.warn);
      session.dismissNotification(n);
    },
    onOpenState: (shareId) => {
      void session
        .viewState(shareId)
        .then(() => openReactCarousel(shareId))
        .catch(console.warn);
      session.dismissNotification(n);
    },
    onDismissState: (shareId) => {
      void session.dontReact(shareId).catch(console.warn);
      session.dismissNotification(n);
    },
    onShareSuggestion: (state: StateName) => {
      void session.shareState(state, "notification_share").catch(console.warn);
      session.dismissNotification(n);
    },
    onDismissSuggestion: () => session.dismissNotification(n),
    onOpenReact: (reactId) => {
      void session.viewReact(reactId).catch(console.warn);
      session.dismissNotification(n);
    },
  });

  session.onChange(() => {
    who.textContent = session.user ? `${session.user} (${session.token})` : "";
    notifArea.replaceChildren(
      ...session.notifications.map((n) => renderNotification(n, handlers(n))),
    );
    if (session.currentList) {
      listArea.replaceChildren(
        renderStateCarousel(session.currentList, (state) => {
          void session.shareState(state, provenance()).catch(console.warn);
        }),
      );
    }
    historyArea.replaceChildren(renderHistory(session.history));
  });
}

async function boot(): Promise<void> {
  const server = query("server") ?? "ws://127.0.0.1:7476";
  const transport = new WsTransport(server);
  const session = new ClientSession(new Connection(transport));
  buildApp(session, document.getElementById("app")!);

  const token = query("token");
  if (token) {
    session.token = token;
  } else {
    await session.register(query("name") ?? "otter");
  }
  const partner = query("partner");
  if (partner) {
    await session.pairWith(partner).catch(console.warn);
  }
  await session.refreshList().catch(console.warn);
  window.setInterval(() => void session.maybeRefresh(Date.now()), 5_000);
}

if (typeof window !== "undefined" && document.getElementById("app")) {
  void boot();
}
