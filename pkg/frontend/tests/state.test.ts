import { JSDOM } from "jsdom";
import { describe, expect, it } from "vitest";

import { EditBufferStore, MemoryStorage } from "../src/state.js";

describe("EditBufferStore", () => {
  it("round-trips per item and clears", () => {
    const store = new EditBufferStore(new MemoryStorage());
    expect(store.load("a")).toBeNull();
    store.save("a", "draft under edit");
    store.save("b", "other text");
    expect(store.load("a")).toBe("draft under edit");
    expect(store.load("b")).toBe("other text");
    store.clear("a");
    expect(store.load("a")).toBeNull();
    expect(store.load("b")).toBe("other text");
  });

  it("persists through browser localStorage", () => {
    const dom = new JSDOM("", { url: "http://localhost/" });
    const store = new EditBufferStore(dom.window.localStorage);
    store.save("CS180:p01", "kept across reload");
    // a fresh store over the same storage sees the buffer, like a page reload
    const again = new EditBufferStore(dom.window.localStorage);
    expect(again.load("CS180:p01")).toBe("kept across reload");
  });
});
