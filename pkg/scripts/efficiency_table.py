"""Mean mechanism cost over the optimum, next to the best and worst equilibrium.

The gap between the best equilibrium and the optimum is a lower bound on the
loss of any mechanism that stops at an equilibrium.
"""
import argparse

from offloadgame.benchmark import equilibrium_report
from offloadgame.experiments import GeneratorSpec, generate_scenario
from offloadgame.mechanism import MechanismConfig, run_mechanism
from offloadgame.model import system_cost


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--n-max", type=int, default=16)
    args = ap.parse_args()

    print(f"{'N':>3} {'mechanism':>10} {'best NE':>9} {'worst NE':>9}")
    for n in range(2, args.n_max + 1):
        mech = best = worst = opt = 0.0
        for trial in range(args.trials):
            seed = args.seed + trial
            s = generate_scenario(GeneratorSpec(n_users=n, seed=seed))
            r = equilibrium_report(s)
            trace = run_mechanism(s, MechanismConfig(seed=seed))
            mech += system_cost(s, trace.final_profile)
            best += r.best_ne_cost
            worst += r.worst_ne_cost
            opt += r.optimum_cost
        print(f"{n:3d} {mech / opt:10.4f} {best / opt:9.4f} {worst / opt:9.4f}")


if __name__ == "__main__":
    main()
