from .balance import RunBundle, theta, monotonicity_balance
from .harnack import SOLITON_KINDS, soliton_trace_term, lyh_trace_values, harnack_trace, harnack_trace_along, \
    harnack_matrix, dim2_harnack
from .mass import mass_integral
from .records import MonotonicityRecord, HarnackSample, HARNACK_KINDS
