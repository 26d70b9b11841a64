"""
How the UCB confidence width L trades exploration for exploitation on
two close routers and a slow one.

    python -m example.confidence_width
"""
import logging

from ccnbandit import analysis, simulation

logging.basicConfig(level=logging.INFO)

ARMS = [
    {'name': 'near', 'shift': 2, 'p': 0.75, 'r': 10},
    {'name': 'close', 'shift': 2, 'p': 0.7, 'r': 10},
    {'name': 'far', 'shift': 6, 'p': 0.7, 'r': 10},
]


def scenario(L, t0=30):
    return simulation.ScenarioConfig.from_dict({
        'arms': ARMS,
        'policy': {'algorithm': 'ucb', 't0': t0, 'L': L},
        'truncation': 20,
        'horizon': 3000,
        'replications': 40,
        'seed': 5,
    })


if __name__ == '__main__':
    for L in (0.5, 2, 8):
        result = simulation.monte_carlo(scenario(L), workers=2)
        print('L={0:<4} fraction optimal {1:.3f}  regret {2:.1f}'.format(
            L, result.mean_fraction_optimal[-1], result.mean_regret[-1]))

    config = scenario(2, t0=60)
    spec = analysis.ArmGapSpec.from_distributions(config.distributions)
    estimate = simulation.empirical_best_arm_prob(config, replications=5000, cut='complete')
    print('t0=60 round-robin: approximation {0:.3f}, simulated {1:.3f} +/- {2:.3f}'.format(
        analysis.thm3_success_approx_rr(spec, 60), estimate.probability, estimate.half_width))
