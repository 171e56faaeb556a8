"""Author a .daff document in-process and drive the three commands on it.

Run with ``python3 demos/dsl_quickstart.py``.
"""

from daffine import dsl, suites

SOURCE = """
# One marked double affine instance and one bundle tower seed.
double main {
    n1 = 2; n2 = 2; n3 = 1;
    l1 = [1, 1];
    l2 = [1, -1];
    sigma = [2];
}

special_bundle tower {
    m = 1; n = 2;
    omega = [3];
}
"""

doc = dsl.parse(SOURCE)
print("blocks:", [(b.kind, b.name) for b in doc.blocks])

# `check` elaborates every block and reports its shape.
print("\n$ daff check  (in-process)")
print(suites.run(doc, "check").to_text())

# `build` constructs a derived object and describes it.
print("$ daff build --op model")
print(suites.run(doc, "build:model").to_text())

# `verify` runs a randomized suite; same seed, same report, every time.
print("$ daff verify --suite duality-pairing --trials 20 --seed 3")
r1 = suites.run(doc, "verify:duality-pairing", seed=3, trials=20)
r2 = suites.run(doc, "verify:duality-pairing", seed=3, trials=20)
print(r1.to_text())
print("deterministic:", r1.to_json() == r2.to_json())

# Documents round-trip through the canonical printer.
printed = dsl.print_document(doc)
print("canonical form:\n" + printed)
assert dsl.print_document(dsl.parse(printed)) == printed
