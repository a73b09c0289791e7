"""Analytic curve fitting at two placeholder scales.

Fits y = sin(2x)/(2x) through its 8 integer sample points with a network
solved entirely by pseudoinverse projections, then evaluates on a dense
grid the samples were drawn from. The init scale c controls how wild the
random placeholder targets are: c=1 tends to interpolate the 8 points
exactly and oscillate violently between them, c=0.1 keeps the surrogate
targets small and trades training error for a tamer curve.

Run: python demos/curve_regression_table.py [seed]
"""
import sys

import pinvnet as pn


def fit(structure, c, seed, train_ds, test_ds):
    spec = pn.build_spec(structure, 1, pn.ActivationKind.softplus08(),
                         linear_output=False)
    report = pn.train(spec, train_ds.x, train_ds.y,
                      pn.TrainConfig(pn.InitScheme.random(seed, c)))
    test_sse = pn.sse(pn.forward(spec, report.weights, test_ds.x), test_ds.y)
    return report.train_sse, test_sse, sum(report.clamped_entry_counts)


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    trains, test = pn.gen_regression()
    train_ds = trains[0]

    print(f"8 train points, 721 test points, seed {seed}")
    print(f"{'network':>12} {'c':>5} {'train SSE':>12} {'test SSE':>12} "
          f"{'clamped':>8}")
    for structure, c in [("8-1", 1.0), ("8-1", 0.1), ("1-1-1-8-1", 0.1)]:
        tr, te, clamped = fit(structure, c, seed, train_ds, test)
        print(f"{structure:>12} {c:>5} {tr:>12.3e} {te:>12.3e} {clamped:>8}")

    print()
    print("c=1 usually drives train SSE to the float noise floor while the")
    print("test SSE explodes; c=0.1 leaves visible train error but a far")
    print("smaller test SSE. Clamped entries mark surrogate targets that")
    print("fell outside the activation's invertible range and were repaired,")
    print("which is also why individual seeds can break the pattern.")


if __name__ == "__main__":
    main()
