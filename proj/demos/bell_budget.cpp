// Copyright 2026 The rement Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Prints the fidelity budget and heralding statistics of the default
// configuration.

#include "rement/rement.hpp"

#include <cstdio>

using namespace rement;

int main() {
  const ProtocolConfig c{};
  const OutcomeTable t = run_two_rounds(c);

  std::printf("%-6s %12s %10s %12s\n", "herald", "probability", "fidelity", "concurrence");
  for (Herald h : kHeralds) {
    const Branch& b = t[h];
    if (b.state)
      std::printf("%-6s %12.6f %10.4f %12.4f\n", herald_name(h).data(), b.probability,
                  state_fidelity(*b.state, states::odd_bell_plus()), concurrence(*b.state));
    else
      std::printf("%-6s %12.6f %10s %12s\n", herald_name(h).data(), b.probability, "-", "-");
  }

  const double f_det = f_det_closed_form(c.round1, c.round2);
  const double f_t2 = decoherence_fidelity(c);
  std::printf("\nF_det  %.4f\nF_T2   %.4f\nF_thy  %.4f\n", f_det, f_t2,
              state_fidelity(*t[Herald::cc].state, states::odd_bell_plus()));

  const SuccessRate sr = success_rate(c);
  std::printf("\nP(C1) %.4f  P(C2|C1) %.4f  rate %.1f /s\n", t.p_click1(), t.p_click2_given_click1(), sr.rate);
  return 0;
}
