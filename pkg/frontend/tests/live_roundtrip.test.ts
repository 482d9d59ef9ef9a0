/** End-to-end explorer round trip against a live engine instance.

Builds a tiny corpus, trains real artifacts through the CLI, starts
the HTTP service on a free port, then drives the jsdom app with a
recording fetch so every request body crossing the wire is asserted
verbatim.
*/

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { createServer, type AddressInfo } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createApp, type App } from "../src/app.js";
import type { QueryResponse, VocabResponse } from "../src/types.js";

const FAMILIES: Record<string, string[]> = {
  city: ["skyline", "night", "tower", "street", "neon"],
  harbor: ["harbor", "boat", "pier", "wave", "gull"],
  forest: ["forest", "pine", "trail", "moss", "fern"],
  desert: ["desert", "dune", "sand", "cactus", "mesa"],
};

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function writeCorpus(path: string): void {
  const names = Object.keys(FAMILIES);
  const rand = mulberry32(7);
  const lines: string[] = [];
  for (let i = 0; i < 80; i++) {
    const f = i % names.length;
    const family = names[f] as string;
    const vocab = FAMILIES[family] as string[];
    const caption = [0, 1, 2]
      .map((j) => vocab[(i + j) % vocab.length])
      .join(" ");
    const features = names.map(
      (_, c) => (c === f ? 1 : 0) + (rand() - 0.5) * 0.1,
    );
    lines.push(
      JSON.stringify({
        id: `doc${String(i).padStart(6, "0")}`,
        caption,
        tags: [family],
        labels: [family],
        split: i % 5 === 3 ? "test" : "train",
        features,
      }),
    );
  }
  writeFileSync(path, lines.join("\n") + "\n");
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const { port } = srv.address() as AddressInfo;
      srv.close(() => resolve(port));
    });
  });
}

let workdir: string;
let server: ChildProcess | null = null;
let stderrBuf = "";
let base: string;
let app: App;
const recorded: { url: string; body?: unknown }[] = [];

function queryBodies(): unknown[] {
  return recorded
    .filter((r) => r.url.endsWith("/api/query"))
    .map((r) => r.body);
}

async function rawQuery(body: unknown): Promise<QueryResponse> {
  const response = await fetch(`${base}/api/query`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  expect(response.ok).toBe(true);
  return (await response.json()) as QueryResponse;
}

function cardIds(): string[] {
  return [...document.querySelectorAll(".result-card")].map(
    (el) => (el as HTMLElement).dataset.id as string,
  );
}

beforeAll(async () => {
  expect(typeof fetch).toBe("function");
  workdir = mkdtempSync(join(tmpdir(), "explorer-"));
  writeCorpus(join(workdir, "corpus.jsonl"));
  const config = {
    corpus: "corpus.jsonl",
    embedding: {
      method: "word2vec",
      dim: 12,
      epochs: 30,
      window: 4,
      min_count: 1,
      seed: 7,
    },
    visual: {
      iterations: 300,
      learning_rate: 0.3,
      decay_interval: 250,
      batch_size: 32,
      hidden: [16],
      seed: 7,
    },
    aggregation: "mean",
    min_tag_count: 1,
    seed: 7,
  };
  const cfgPath = join(workdir, "engine.json");
  writeFileSync(cfgPath, JSON.stringify(config, null, 2));

  for (const cmd of ["train-text", "train-visual", "build-index"]) {
    execFileSync("jointemb", [cmd, "--config", cfgPath], { stdio: "pipe" });
  }

  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn(
    "jointemb",
    ["serve", "--config", cfgPath, "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stderr?.on("data", (chunk: Buffer) => {
    stderrBuf += chunk.toString();
  });

  const deadline = Date.now() + 60_000;
  let healthy = false;
  let lastErr: unknown = null;
  while (Date.now() < deadline) {
    if (server.exitCode !== null) {
      throw new Error(`server exited early (${server.exitCode}): ${stderrBuf}`);
    }
    try {
      const r = await fetch(`${base}/api/health`);
      if (r.ok) {
        healthy = true;
        break;
      }
    } catch (err) {
      lastErr = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  if (!healthy) {
    throw new Error(`server never healthy: ${String(lastErr)}\n${stderrBuf}`);
  }

  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const recordingFetch = (input: string, init?: RequestInit) => {
    const entry: { url: string; body?: unknown } = { url: input };
    if (typeof init?.body === "string") entry.body = JSON.parse(init.body);
    recorded.push(entry);
    return fetch(input, init);
  };
  app = createApp(root, new ApiClient(base, recordingFetch));
});

afterAll(() => {
  server?.kill("SIGTERM");
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("explorer round trip", () => {
  it("composing skyline + night issues the exact body and renders in response order", async () => {
    app.dispatch({ type: "add_text", value: "skyline" });
    app.dispatch({ type: "add_text", value: "night" });
    expect(document.querySelectorAll(".chip")).toHaveLength(2);
    await app.submit();

    const bodies = queryBodies();
    expect(bodies).toHaveLength(1);
    const expected = {
      terms: [
        { text: "skyline", weight: 1 },
        { text: "night", weight: 1 },
      ],
      k: 12,
    };
    expect(bodies[0]).toEqual(expected);

    const reference = await rawQuery(expected);
    expect(reference.results.length).toBeGreaterThan(0);
    expect(cardIds()).toEqual(reference.results.map((r) => r.id));

    const scores = [...document.querySelectorAll(".result-score")].map(
      (el) => el.textContent,
    );
    expect(scores).toEqual(reference.results.map((r) => r.score.toFixed(3)));
  });

  it("removing the night chip re-issues the query with only skyline", async () => {
    const removes = document.querySelectorAll<HTMLButtonElement>(".chip-remove");
    removes[1]?.click();
    expect(app.draft().chips).toEqual([
      { kind: "text", value: "skyline", weight: 1 },
    ]);

    await app.submit();
    const expected = { terms: [{ text: "skyline", weight: 1 }], k: 12 };
    expect(queryBodies().at(-1)).toEqual(expected);

    const reference = await rawQuery(expected);
    expect(cardIds()).toEqual(reference.results.map((r) => r.id));
  });

  it("biasing from a result card adds an image term sent verbatim, no auto-submit", async () => {
    const topId = cardIds()[0] as string;
    const before = queryBodies().length;
    document.querySelector<HTMLButtonElement>(".bias-more")?.click();

    // a chip appeared but no request was fired by the click itself
    expect(queryBodies()).toHaveLength(before);
    expect(app.draft().chips.at(-1)).toEqual({
      kind: "image",
      value: topId,
      weight: 1,
    });

    await app.submit();
    expect(queryBodies().at(-1)).toEqual({
      terms: [
        { text: "skyline", weight: 1 },
        { image_id: topId, weight: 1 },
      ],
      k: 12,
    });
    expect(cardIds().length).toBeGreaterThan(0);
  });

  it("autocomplete suggestions are a subset of the live vocabulary", async () => {
    app.els.input.value = "sk";
    app.els.input.dispatchEvent(new Event("input"));
    await new Promise((resolve) => setTimeout(resolve, 300));
    await app.idle();

    const shown = [...document.querySelectorAll(".suggestion")].map(
      (el) => el.textContent,
    );
    expect(shown.length).toBeGreaterThan(0);

    const dump = await fetch(`${base}/api/vocab?prefix=sk&limit=50`);
    const vocab = (await dump.json()) as VocabResponse;
    for (const token of shown) {
      expect(vocab.tokens).toContain(token);
    }
    expect(shown).toContain("skyline");
  });
});
