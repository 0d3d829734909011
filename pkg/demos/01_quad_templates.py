"""Quads and their label-sequence template.

Every sentiment annotation is a set of quads; generators read and write
them as flat label sequences. This demo walks through serialization,
parsing of malformed generator output, and taxonomy validation.
"""

from quadscorer import (IMPLICIT, Quad, parse_label_sequence, serialize_quads,
                        validate_quad)

quads = [
    Quad("food", "food quality", "great", "positive"),
    Quad("food", "food prices", "reasonably priced", "positive"),
]
text = serialize_quads(quads)
print("review: 'the food is great and reasonably priced'")
print("label :", text)

# the template inverts exactly, and whitespace around separators is free
parsed, dropped = parse_label_sequence("food quality|positive|food|great")
print("\ntight spacing parses to the same quad:", parsed[0])

# implicit aspects / opinions use the NULL sentinel, empty sets say NONE
print("\nimplicit aspect:", serialize_quads(
    [Quad(IMPLICIT, "restaurant general", "lovely", "positive")]))
print("no sentiment   :", serialize_quads([]))

# generator output can be malformed; bad segments are counted, not fatal
parsed, dropped = parse_label_sequence(
    "food quality | positive | food | great ; oops | truncated")
print(f"\nmalformed tail: kept {len(parsed)} quad(s), dropped {dropped} segment(s)")

# validation reports problems as data so they can be aggregated
taxonomy = ["food quality", "food prices", "service general"]
bad = Quad("food", "foo bar", "great", "happy")
print("\nviolations for (food, foo bar, great, happy):")
for violation in validate_quad(bad, taxonomy):
    print(" -", violation)
