"""An analysis-of-effect-sizes table end to end.

Builds a small clinical-style CSV (group / age / gender, proportion outcome),
then produces the full per-factor table and the reduced-model comparison that
tests two factors jointly.
"""

import numpy as np

from resi import anoes_table, load_csv, make_stream, to_text

rng = make_stream(77)
n = 120
path = "demo_output_anoes.csv"

group = np.where(rng.random(n) < 0.5, "patient", "control")
age = np.round(rng.normal(36.0, 9.0, n), 1)
gender = np.where(rng.random(n) < 0.5, "female", "male")
eta = 1.0 - 0.9 * (group == "patient") - 0.03 * (age - 36.0)
accuracy = np.clip(1 / (1 + np.exp(-eta)) + 0.06 * rng.standard_normal(n), 0.02, 0.98)

with open(path, "w") as fh:
    fh.write("group,age,gender,accuracy\n")
    for row in zip(group, age, gender, accuracy):
        fh.write(f"{row[0]},{row[1]},{row[2]},{row[3]:.4f}\n")

data, factors = load_csv(path, "accuracy", ["group", "age", "gender"], family="binomial")

print("== full table (sandwich covariance, bootstrap CIs) ==")
table = anoes_table(data, factors, family="binomial", replicates=500, seed=11)
print(to_text(table))

print("== joint effect of age and gender after controlling for group ==")
reduced = anoes_table(data, factors, family="binomial", replicates=500, seed=11, reduced=["group"])
print(to_text(reduced))
