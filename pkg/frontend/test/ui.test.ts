// Scripted browser session: drives the real DOM through the send -> notify
// -> quick-react and send -> view -> full-react -> history paths, with every
// emitted envelope schema-checked by the fake server.

import { beforeEach, describe, expect, it } from "vitest";

import { Envelope } from "../src/protocol.js";
import { ClientSession } from "../src/state.js";
import { Connection } from "../src/socket.js";
import { buildApp } from "../src/main.js";
import { FakeServer, FakeTransport, connectedPair } from "./fake_server.js";

let transport: FakeTransport;
let server: FakeServer;
let session: ClientSession;
let root: HTMLElement;

function sentOfType(type: string): Envelope[] {
  return transport.sentLines
    .map((line) => JSON.parse(line) as Envelope)
    .filter((envelope) => envelope.type === type);
}

async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

beforeEach(async () => {
  ({ transport, server } = connectedPair());
  session = new ClientSession(new Connection(transport));
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  buildApp(session, root);
  await session.register("alice");
  await session.pairWith("u2");
  await session.refreshList();
  await flush();
});

describe("state carousel", () => {
  it("renders one card per state, three for a list of three", () => {
    const cards = root.querySelectorAll(".state-card");
    expect(cards).toHaveLength(3);
    expect(cards[0].textContent).toContain("calm");
  });

  it("marks sensing-on lists with the badge and off lists without", async () => {
    expect(root.querySelector(".state-carousel .sensed-badge")).toBeNull();
    server.listBody = {
      window_id: 2,
      mode: "sensing_on",
      states: ["eating", "neutral", "waving"],
      social: "waving",
      sensed: true,
    };
    await session.refreshList();
    await flush();
    expect(root.querySelector(".state-carousel .sensed-badge")).not.toBeNull();
  });

  it("emits a share_state envelope on tap", async () => {
    (root.querySelector(".state-card") as HTMLElement).click();
    await flush();
    const shares = sentOfType("share_state");
    expect(shares).toHaveLength(1);
    expect(shares[0].body.state).toBe("calm");
    expect(shares[0].body.provenance).toBe("random_list");
  });
});

describe("send -> notify -> quick-react path", () => {
  it("renders exactly 4 quick-react buttons and quick-reacts from the toast", async () => {
    server.partnerShares("sad");
    await flush();
    const toast = root.querySelector(".notification.partner_state_visit")!;
    expect(toast).not.toBeNull();
    const quickButtons = toast.querySelectorAll(".quick-react-btn");
    expect(quickButtons).toHaveLength(4);
    expect(
      [...quickButtons].map((b) => (b as HTMLElement).dataset.react),
    ).toEqual(["love", "nodding", "handholding", "hugging"]);

    (quickButtons[0] as HTMLElement).click();
    await flush();
    const reacts = sentOfType("send_react");
    expect(reacts).toHaveLength(1);
    expect(reacts[0].body.react).toBe("love");
    expect(reacts[0].body.via).toBe("quick");
    // Toast is gone after reacting.
    expect(root.querySelector(".notification.partner_state_visit")).toBeNull();
  });

  it("dismissing the toast emits dont_react", async () => {
    server.partnerShares("bored");
    await flush();
    (root.querySelector(".dismiss-btn") as HTMLElement).click();
    await flush();
    expect(sentOfType("dont_react")).toHaveLength(1);
    expect(sentOfType("send_react")).toHaveLength(0);
  });
});

describe("send -> view -> full-react -> history path", () => {
  it("opens the 15-entry react carousel and records the react in history", async () => {
    const shareId = server.partnerShares("calm");
    await flush();
    (root.querySelector(".notification .notif-icon") as HTMLElement).click();
    await flush();
    expect(sentOfType("view_state")).toHaveLength(1);

    const cards = root.querySelectorAll(".react-carousel .react-card");
    expect(cards).toHaveLength(15); // 14 reacts + Don't react
    expect(cards[14].textContent).toContain("Don't react");

    const pat = [...cards].find(
      (c) => (c as HTMLElement).dataset.react === "pat_on_the_back",
    )!;
    (pat as HTMLElement).click();
    await flush();
    const reacts = sentOfType("send_react");
    expect(reacts).toHaveLength(1);
    expect(reacts[0].body.via).toBe("in_app");
    expect(reacts[0].body.id).toBe(shareId);

    // History shows our react beside the state it answered.
    const entry = root.querySelector(".history-entry.sent.react")!;
    expect(entry).not.toBeNull();
    expect(entry.querySelector(".referenced-state")).not.toBeNull();
  });

  it("choosing Don't react emits dont_react and closes the carousel", async () => {
    server.partnerShares("calm");
    await flush();
    (root.querySelector(".notification .notif-icon") as HTMLElement).click();
    await flush();
    const dont = root.querySelector(".dont-react") as HTMLElement;
    dont.click();
    await flush();
    expect(sentOfType("dont_react")).toHaveLength(1);
    expect(root.querySelector(".react-carousel")).toBeNull();
  });

  it("shows the partner's react beside the referenced state in history", async () => {
    (root.querySelector(".state-card") as HTMLElement).click();
    await flush();
    const shared = sentOfType("share_state");
    expect(shared).toHaveLength(1);
    server.partnerReacts("thumbs_up", "p1-m1", "calm");
    await flush();
    const entry = root.querySelector(".history-entry.received.react")!;
    expect(entry).not.toBeNull();
    expect(entry.textContent).toContain("thumbs up");
    expect(entry.querySelector(".referenced-state")).not.toBeNull();
  });
});

describe("react notifications cannot be reacted to", () => {
  it("renders no react buttons on a partner-react toast", async () => {
    server.partnerReacts("love", "p1-m9", "calm");
    await flush();
    const toast = root.querySelector(".notification.partner_react")!;
    expect(toast).not.toBeNull();
    expect(toast.querySelectorAll(".quick-react-btn")).toHaveLength(0);
    (toast.querySelector(".notif-icon") as HTMLElement).click();
    await flush();
    expect(sentOfType("view_react")).toHaveLength(1);
    expect(sentOfType("send_react")).toHaveLength(0);
  });
});

describe("own-state suggestions", () => {
  it("shows the sensed badge only when flagged and shares via the button", async () => {
    server.suggestOwnState("eating", true);
    await flush();
    let toast = root.querySelector(".notification.own_state_suggestion")!;
    expect(toast.querySelector(".sensed-badge")).not.toBeNull();
    (toast.querySelector(".share-btn") as HTMLElement).click();
    await flush();
    const shares = sentOfType("share_state");
    expect(shares).toHaveLength(1);
    expect(shares[0].body.provenance).toBe("notification_share");

    server.suggestOwnState("bored", false);
    await flush();
    toast = root.querySelector(".notification.own_state_suggestion")!;
    expect(toast.querySelector(".sensed-badge")).toBeNull();
    // Dismiss is local: no envelope beyond the one share above.
    (toast.querySelector(".dismiss-btn") as HTMLElement).click();
    await flush();
    expect(sentOfType("share_state")).toHaveLength(1);
    expect(sentOfType("dont_react")).toHaveLength(0);
  });
});

describe("window rollover", () => {
  it("re-fetches the list when the 10-minute window changes", async () => {
    const before = sentOfType("get_state_list").length;
    await session.maybeRefresh(1 * 600_000 + 1); // same window as the fake list
    expect(sentOfType("get_state_list")).toHaveLength(before);
    await session.maybeRefresh(5 * 600_000 + 1);
    expect(sentOfType("get_state_list")).toHaveLength(before + 1);
  });
});
