"""Distance between the Neumann minimizer and the Steklov eigenspace over the
a-grid, for the ball oracle and the planar FEM path."""

from neumann_steklov.experiments import SweepConfig, run_minimizer_sweep


def main():
    for title, cfg in [("ball, radial oracle", SweepConfig(n=3)),
                       ("disk, FEM (p=q=2)", SweepConfig(n=2, outside_hypotheses=True))]:
        print(f"-- {title}")
        for r in run_minimizer_sweep(cfg):
            print(f"a={r['a']:<8.5g} distance={r['distance']:.6g}")


if __name__ == "__main__":
    main()
