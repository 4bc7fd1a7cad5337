"""Quick check of the compiled extension: python python/smoke_test.py"""

import math

import boxsums

psi = boxsums.Wavefunction("x*(1-x)")
assert psi.degree == 2
assert psi.norm_squared() == "1/30"
assert psi.mean_energy() == "10"
assert psi.mean_energy_hbar2_over_m() == "5"
assert psi.shift_parity() == "even"
print(psi, psi.weight_formula())

w = psi.weights(2000)
assert abs(sum(w) - 1.0) < 1e-9

table = boxsums.derive(8)
coef, power = table["zeta(4)"]
assert (coef, power) == ("1/90", 4)
assert table["eta(6)"] == ("31/30240", 6)
num, den = map(int, table["lambda(4)"][0].split("/"))
assert abs(num / den * math.pi**4 - sum((2 * n + 1) ** -4 for n in range(10000))) < 1e-10

assert boxsums.classify(4) == [4, 6, 8]
assert all(row[-1] for row in boxsums.verify(12, 20000))

try:
    boxsums.Wavefunction("1 + x")
except ValueError as e:
    print("rejected:", e)
else:
    raise AssertionError("boundary violation not detected")

print("smoke test ok")
