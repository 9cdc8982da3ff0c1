"""Twisted shift algebras on a one-dimensional lattice.

A defining sequence of 2x2 matrices over Z_d fixes the commutation twists
between Weyl letters at different lattice sites. This package builds such
sequences, realizes the letters on finite spin chains (directly and through
a doubled-chain embedding with commuting tails), and analyzes the phase
sequences v(I) along the shift orbit to decide, at finite N, whether the
tracial state can be the only shift-invariant state.
"""

from .zmod import (ModMat2, ModScalar, ModVec2, ModulusMismatch,
                   NonPrimeModulus, NotInvertible, adjugate, det, hat, inv,
                   is_prime, symplectic)
from .seqgen import (Bitstream, DefiningSequence, bernoulli,
                     bernoulli_constrained, constant, explicit, load_jsonl,
                     parse_spec, periodic, price_powers, typicality_test,
                     write_jsonl, zero)
from .words import (GroupElement, MultiIndex, Phase, cocycle,
                    commutation_phase, element, identity, inverse, letter,
                    multiply, parse_word, shift, trace, twist_profile,
                    twist_u)
from .spinchain import (ConditionViolated, DimensionCapExceeded, RepTable,
                        build_rep_table, check_sympl_sum, embed_letter,
                        embed_word, is_nonvanishing, multicommutator,
                        verify_relations, weyl_matrix)
from .jordanwigner import (JWEmbedding, commutation_phase as jw_commutation_phase,
                           dense, jw_embed, jw_word, price_powers_letter,
                           product_state_expectation, shift_eigenvector)
from .spectrum import (BochnerMeasure, CorrelationSeq, PhaseSeq,
                       SpectralReport, Verdict, bochner_measure,
                       double_average, fourier_bohr, mean_nu, partial_corr,
                       phase_sequence, positive_definite_check,
                       random_word_family, singleton_family,
                       spectral_reports, subsequence_diagnostics, verdict)

__version__ = "0.1.0"
