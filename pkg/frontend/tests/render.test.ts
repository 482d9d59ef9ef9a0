import { beforeEach, describe, expect, it, vi } from "vitest";
import { renderChips, renderError, renderResults } from "../src/render.js";
import { replay } from "../src/state.js";
import type { ItemDetail, ResultItem } from "../src/types.js";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  container = document.createElement("div");
  document.body.appendChild(container);
});

function detail(partial: Partial<ItemDetail> & { id: string }): ItemDetail {
  return {
    caption: "",
    tags: [],
    labels: null,
    split: "test",
    image_url: null,
    indexed: true,
    ...partial,
  };
}

describe("renderChips", () => {
  const draft = replay([
    { type: "add_text", value: "skyline" },
    { type: "add_image", imageId: "doc000004", sign: -1 },
  ]);

  it("shows one chip per term with its weight slider", () => {
    renderChips(container, draft, { onRemove: () => {}, onWeight: () => {} });
    const chips = container.querySelectorAll(".chip");
    expect(chips).toHaveLength(2);
    expect(chips[0]?.querySelector(".chip-label")?.textContent).toBe("skyline");
    expect(chips[1]?.querySelector(".chip-label")?.textContent).toBe("img:doc000004");

    const slider = chips[0]?.querySelector<HTMLInputElement>(".chip-weight");
    expect(slider?.min).toBe("-2");
    expect(slider?.max).toBe("2");
    expect(slider?.value).toBe("1");
    const negSlider = chips[1]?.querySelector<HTMLInputElement>(".chip-weight");
    expect(negSlider?.value).toBe("-1");
  });

  it("wires remove and weight handlers with the chip index", () => {
    const onRemove = vi.fn();
    const onWeight = vi.fn();
    renderChips(container, draft, { onRemove, onWeight });

    const chips = container.querySelectorAll(".chip");
    chips[1]?.querySelector<HTMLButtonElement>(".chip-remove")?.click();
    expect(onRemove).toHaveBeenCalledWith(1);

    const slider = chips[0]?.querySelector<HTMLInputElement>(".chip-weight");
    if (!slider) throw new Error("missing slider");
    slider.value = "-1.5";
    slider.dispatchEvent(new Event("input"));
    expect(onWeight).toHaveBeenCalledWith(0, -1.5);
  });

  it("re-rendering replaces prior content", () => {
    renderChips(container, draft, { onRemove: () => {}, onWeight: () => {} });
    renderChips(container, replay([{ type: "add_text", value: "x" }]), {
      onRemove: () => {},
      onWeight: () => {},
    });
    expect(container.querySelectorAll(".chip")).toHaveLength(1);
  });
});

describe("renderResults", () => {
  it("keeps the server's order even when scores are not monotonic", () => {
    // deliberately unsorted scores: the UI must not reorder
    const results: ResultItem[] = [
      { id: "b", score: 0.2 },
      { id: "a", score: 0.9 },
      { id: "c", score: 0.5 },
    ];
    renderResults(container, results, new Map(), { onBias: () => {} });
    const ids = [...container.querySelectorAll(".result-card")].map(
      (el) => (el as HTMLElement).dataset.id,
    );
    expect(ids).toEqual(["b", "a", "c"]);
  });

  it("formats scores to exactly three decimals", () => {
    renderResults(
      container,
      [
        { id: "a", score: 0.98765 },
        { id: "b", score: 1 },
      ],
      new Map(),
      { onBias: () => {} },
    );
    const scores = [...container.querySelectorAll(".result-score")].map(
      (el) => el.textContent,
    );
    expect(scores).toEqual(["0.988", "1.000"]);
  });

  it("renders a thumbnail when the item has an image url", () => {
    const details = new Map([
      ["a", detail({ id: "a", image_url: "http://img/a.png", caption: "a cap" })],
      ["b", detail({ id: "b", tags: ["urban", "night"] })],
    ]);
    renderResults(
      container,
      [
        { id: "a", score: 0.9 },
        { id: "b", score: 0.8 },
      ],
      details,
      { onBias: () => {} },
    );
    const cards = container.querySelectorAll(".result-card");
    expect(cards[0]?.querySelector("img")?.getAttribute("src")).toBe(
      "http://img/a.png",
    );
    expect(cards[1]?.querySelector("img")).toBeNull();
    expect(cards[1]?.querySelector(".result-tags")?.textContent).toBe(
      "urban, night",
    );
  });

  it("missing detail still renders id, score and bias buttons", () => {
    renderResults(container, [{ id: "ghost", score: 0.1 }], new Map(), {
      onBias: () => {},
    });
    const card = container.querySelector(".result-card");
    expect(card?.querySelector(".result-id")?.textContent).toBe("ghost");
    expect(card?.querySelectorAll("button")).toHaveLength(2);
  });

  it("bias buttons report the item id and sign", () => {
    const onBias = vi.fn();
    renderResults(
      container,
      [
        { id: "a", score: 0.9 },
        { id: "b", score: 0.8 },
      ],
      new Map(),
      { onBias },
    );
    const cards = container.querySelectorAll(".result-card");
    cards[0]?.querySelector<HTMLButtonElement>(".bias-more")?.click();
    cards[1]?.querySelector<HTMLButtonElement>(".bias-less")?.click();
    expect(onBias).toHaveBeenNthCalledWith(1, "a", 1);
    expect(onBias).toHaveBeenNthCalledWith(2, "b", -1);
  });
});

describe("renderError", () => {
  it("shows the message and reason", () => {
    renderError(container, "degenerate_query", "terms cancel out");
    const box = container.querySelector<HTMLElement>(".error-box");
    expect(box?.dataset.reason).toBe("degenerate_query");
    expect(box?.querySelector(".error-message")?.textContent).toBe(
      "terms cancel out",
    );
    expect(box?.querySelector(".error-retry")).toBeNull();
  });

  it("offers retry only when a handler is supplied", () => {
    const onRetry = vi.fn();
    renderError(container, "network", "server unreachable", onRetry);
    const retry = container.querySelector<HTMLButtonElement>(".error-retry");
    expect(retry).not.toBeNull();
    retry?.click();
    expect(onRetry).toHaveBeenCalledTimes(1);
  });
});
