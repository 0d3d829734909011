import { describe, expect, it } from "vitest";

import { parseLabelSequence, validateWriteIn } from "../src/template.js";

describe("parseLabelSequence", () => {
  it("parses a single quad", () => {
    const { quads, dropped } = parseLabelSequence(
      "food quality | positive | food | great",
    );
    expect(dropped).toBe(0);
    expect(quads).toEqual([
      { category: "food quality", sentiment: "positive", aspect: "food", opinion: "great" },
    ]);
  });

  it("accepts tight spacing", () => {
    const { quads, dropped } = parseLabelSequence("food quality|positive|food|great");
    expect(dropped).toBe(0);
    expect(quads).toHaveLength(1);
  });

  it("treats NONE as an empty quad set", () => {
    expect(parseLabelSequence("NONE")).toEqual({ quads: [], dropped: 0 });
  });

  it("drops segments with the wrong field count", () => {
    expect(parseLabelSequence("a | b | c")).toEqual({ quads: [], dropped: 1 });
  });

  it("drops segments with an unknown sentiment", () => {
    const { quads, dropped } = parseLabelSequence("food quality | happy | food | great");
    expect(quads).toHaveLength(0);
    expect(dropped).toBe(1);
  });

  it("keeps good segments next to bad ones", () => {
    const { quads, dropped } = parseLabelSequence(
      "food quality | positive | food | great ; broken segment",
    );
    expect(quads).toHaveLength(1);
    expect(dropped).toBe(1);
  });
});

describe("validateWriteIn", () => {
  it("accepts a clean multi-quad label", () => {
    const result = validateWriteIn(
      "food quality | positive | food | great ; service general | negative | staff | rude",
    );
    expect(result.valid).toBe(true);
    expect(result.quads).toHaveLength(2);
  });

  it("rejects empty text", () => {
    expect(validateWriteIn("   ").valid).toBe(false);
  });

  it("rejects malformed segments with a reason", () => {
    const result = validateWriteIn("a | b | c");
    expect(result.valid).toBe(false);
    expect(result.message).toContain("malformed");
  });

  it("rejects NONE (a write-in must carry a quad)", () => {
    expect(validateWriteIn("NONE").valid).toBe(false);
  });
});
