import { describe, expect, test } from "vitest";

import { clampPageIndex, pageCount, pageRequest } from "../src/pagination.js";

describe("pageRequest", () => {
  test("maps page index to server offsets", () => {
    expect(pageRequest(0, 20)).toEqual({ offset: 0, limit: 20 });
    expect(pageRequest(3, 20)).toEqual({ offset: 60, limit: 20 });
    expect(pageRequest(2, 7)).toEqual({ offset: 14, limit: 7 });
  });

  test("rejects nonsense", () => {
    expect(() => pageRequest(-1, 20)).toThrow(RangeError);
    expect(() => pageRequest(0, 0)).toThrow(RangeError);
  });
});

describe("pageCount", () => {
  test("25 samples at page size 20 is two pages", () => {
    expect(pageCount(25, 20)).toBe(2);
  });

  test("exact multiples and empty queues", () => {
    expect(pageCount(40, 20)).toBe(2);
    expect(pageCount(0, 20)).toBe(1);
    expect(pageCount(1, 20)).toBe(1);
  });
});

describe("clampPageIndex", () => {
  test("keeps the index inside the page range", () => {
    expect(clampPageIndex(5, 25, 20)).toBe(1);
    expect(clampPageIndex(-2, 25, 20)).toBe(0);
    expect(clampPageIndex(1, 25, 20)).toBe(1);
    expect(clampPageIndex(0, 0, 20)).toBe(0);
  });
});
