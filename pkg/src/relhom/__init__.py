"""Dismantlability, homomorphism reconfiguration, mixing and Gibbs exactness for finite relational structures."""
from .structures import (INFINITY, CapExceeded, ParseError, RelStructure, Signature, StructureError, Walk,
                         boundary, canonical_form, components, diameter, distance, distances_from, element_token,
                         induced_substructure, is_connected, is_forest, is_isomorphic, load_structure,
                         parse_structure, render_structure, sphere, structure)
from .constructions import add_constants, constant_symbol, diagonal, link, product, project, square, walk_forest
from .dismantling import (DecisionReport, DismantleSequence, FoldRecord, Retraction, build_square_sequence,
                          decide_main, dominated_elements, dominates, dominators, fold, greedy_dismantle,
                          is_dismantlable, symmetric_pair_dismantle)
from .homomorphisms import (Homomorphism, PartialMap, count_homs, enumerate_homs, extend_partial, hom_array,
                            is_homomorphism, label_rigidity, mixed_extension)
from .homgraphs import (JWalk, Verdict, check_B3, check_B5, cn_adjacent, hom_components, j_connected, l_adjacent,
                        link_walk_correspondence)
from .mixing import (GapReport, MixingQuery, check_C2, connect_constructive, gap_search, mix_constructive, omega,
                     tssm_check, vw_mixing)
from .gibbs import (GibbsSpecification, boundary_influence, conditional_marginal, hardcore_critical_activity,
                    jsm_report, partition_function)
from .duality import (ObstructionReport, constant_expansion, enumerate_critical_obstructions,
                      extension_via_obstructions, finite_duality_via_A1c, is_core, is_critical_obstruction, maps_to)
from .fixtures import fixture

__version__ = "0.1.0"
