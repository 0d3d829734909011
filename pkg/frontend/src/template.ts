/**
 * Client-side mirror of the label-sequence template rules.
 *
 * The service rejects malformed write-ins anyway; this copy exists so the
 * submit control can stay disabled until the text would be accepted, and
 * so candidates can be rendered as structured quad tables.
 */

export const SENTIMENTS = ["positive", "negative", "neutral"] as const;
export const NO_SENTIMENT_TEXT = "NONE";

export interface Quad {
  category: string;
  sentiment: string;
  aspect: string;
  opinion: string;
}

export interface ParseResult {
  quads: Quad[];
  dropped: number;
}

/** Split on ";" then "|", trimming fields; count malformed segments. */
export function parseLabelSequence(text: string): ParseResult {
  if (text.trim() === NO_SENTIMENT_TEXT) {
    return { quads: [], dropped: 0 };
  }
  const quads: Quad[] = [];
  let dropped = 0;
  for (const segment of text.split(";")) {
    const fields = segment.split("|").map((f) => f.trim());
    if (fields.length !== 4) {
      dropped += 1;
      continue;
    }
    const [category, sentiment, aspect, opinion] = fields;
    if (
      !(SENTIMENTS as readonly string[]).includes(sentiment) ||
      category === "" ||
      aspect === "" ||
      opinion === ""
    ) {
      dropped += 1;
      continue;
    }
    quads.push({ category, sentiment, aspect, opinion });
  }
  return { quads, dropped };
}

export interface WriteInValidation {
  valid: boolean;
  message: string;
  quads: Quad[];
}

/** A write-in must parse with zero dropped segments and carry a quad. */
export function validateWriteIn(text: string): WriteInValidation {
  if (text.trim() === "") {
    return { valid: false, message: "write-in label is empty", quads: [] };
  }
  const { quads, dropped } = parseLabelSequence(text);
  if (dropped > 0) {
    return {
      valid: false,
      message: `${dropped} malformed segment(s); expected "category | sentiment | aspect | opinion"`,
      quads,
    };
  }
  if (quads.length === 0) {
    return {
      valid: false,
      message: "a write-in must contain at least one quad",
      quads,
    };
  }
  return { valid: true, message: `parses to ${quads.length} quad(s)`, quads };
}
