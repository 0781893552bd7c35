"""
Noise-Free Confusion Demo
=========================

Walks through the built-in noise-free experiment on the four-state benchmark
plant. An actuator fault cycles through a sinusoid, a decay that matches the
actuator's transmission zero and a constant offset.

The demo shows:
1. The learned kernel filter and its residual dimension
2. Per-channel fault dictionaries and their ranks
3. Window-by-window decisions, with the zero-matched segment left ambiguous
4. The pairwise discernibility table that predicts the ambiguity
"""

import logging
import sys
import os
from collections import Counter

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from faultiso.config import ConfigLoader
from faultiso.errors import FaultIsolationError
from faultiso.pipeline import run_scenario


class NoiseFreeConfusionDemo:
    """Noise-free isolation on the benchmark plant"""

    def __init__(self, config_name: str = "scenario1"):
        self.logger = logging.getLogger(__name__)
        self.config = ConfigLoader().load_experiment(config_name)
        self.result = None

    def run(self):
        print("=" * 80)
        print("NOISE-FREE CONFUSION DEMO: actuator fault through a transmission zero")
        print("=" * 80)
        print()

        self.result = run_scenario(self.config)

        self._phase_1_kernel()
        self._phase_2_dictionaries()
        self._phase_3_decisions()
        self._phase_4_discernibility()

        print("=" * 80)
        print("Demo complete")
        print("=" * 80)

    def _phase_1_kernel(self):
        print("PHASE 1: Kernel filter")
        print("-" * 40)
        kernel = self.result.kernel
        print(f"   window length L     : {kernel.L}")
        print(f"   residual dimension  : {kernel.r}")
        print(f"   detection threshold : {self.result.threshold:.3e}")
        print()

    def _phase_2_dictionaries(self):
        print("PHASE 2: Fault dictionaries")
        print("-" * 40)
        dictionaries = self.result.dictionaries
        for dictionary in dictionaries:
            print(f"   {dictionary.channel.label}: rank {dictionary.rank}, nullity {dictionary.nullity}")
        print()

    def _phase_3_decisions(self):
        print("PHASE 3: Window decisions")
        print("-" * 40)
        for start, end in ((0, 10), (10, 70), (70, 130), (130, 200)):
            labels = Counter(d.label for d in self.result.decisions[start:end])
            summary = ", ".join(f"{label} x{count}" for label, count in labels.most_common())
            print(f"   windows [{start:3d}, {end:3d}): {summary}")

        card = self.result.score
        print()
        print(f"   accuracy (detected windows) : {card.accuracy}")
        print(f"   accuracy (steady windows)   : {card.accuracy_steady}")
        print(f"   ambiguous windows           : {card.ambiguous}")
        print()

    def _phase_4_discernibility(self):
        print("PHASE 4: Discernibility")
        print("-" * 40)
        report = self.result.discernibility
        if report is None:
            print("   discernibility analysis disabled in this config")
            print()
            return
        for record in report.records:
            a, b = (c.label for c in record.channels)
            flag = "INDISCERNIBLE" if record.indiscernible else "ok"
            print(f"   {a:>3} / {b:<3}  d_cap={record.d_cap}  case={record.theorem_case.value:<22} {flag}")
        print()


def main():
    logging.basicConfig(
        level=logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stdout)],
    )

    try:
        NoiseFreeConfusionDemo().run()
    except KeyboardInterrupt:
        print("\n\nDemo interrupted by user")
    except FaultIsolationError as e:
        print(f"\n\nDemo failed with error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
