"""Packed-array layouts shared by the compiled and pure-Python kernels."""

# AseParams, in dataclass field order.
ASE_FIELDS = ("tau_m", "V0", "Vd", "Vh", "k_m", "beta_d", "gamma_d", "delta_d",
              "beta_h", "alpha_L0_d", "alpha_R0_d", "alpha_0_h", "tau_L", "tau_R",
              "C_R_min", "eta_R", "V_T", "V_max")
(P_TAU_M, P_V0, P_VD, P_VH, P_KM, P_BD, P_GD, P_DD, P_BH, P_AL0, P_AR0, P_A0H,
 P_TAUL, P_TAUR, P_CRMIN, P_ETAR, P_VT, P_VMAX) = range(len(ASE_FIELDS))

# Per-neuron ASE state.
ASE_STATE = ("V", "u", "b", "i", "uh", "bh", "threshold")
A_V, A_U, A_B, A_I, A_UH, A_BH, A_THR = range(len(ASE_STATE))

# LEIF rows: C_mem, g_L, V0, V_T, V_max.
L_C, L_G, L_V0, L_VT, L_VMAX = range(5)

# Synapse rows: source, target, w, I0, tau, tau_s.
S_SRC, S_TGT, S_W, S_I0, S_TAU, S_TAUS = range(6)

# Arena vector.
AR_W, AR_H, AR_BASE, AR_LO, AR_HI = range(5)

# SNN control scalars.
CTL_FIELDS = ("dt", "C_track", "I_app0", "I_bias5", "I_bias6", "turn_det",
              "turn_rand", "v1", "v2", "sensor_tau", "sensor_stages", "noise_amp",
              "rec_every")
(C_DT, C_TRACK, C_IAPP, C_B5, C_B6, C_TURN, C_TURNR, C_V1, C_V2, C_STAU,
 C_STAGES, C_NOISE, C_REC) = range(len(CTL_FIELDS))

# SNN float state: kinematics, sensor filter, 7 potentials, 2 ASE blocks,
# then 2 * n_syn synaptic traces.
X_X, X_Y, X_H, X_SPEED, X_LAST, X_F1, X_F2 = range(7)
X_V = 7             # V of N1..N7 at X_V + j (N3/N4 slots unused)
X_ASE3 = X_V + 7    # ASE state of N3
X_ASE4 = X_ASE3 + len(ASE_STATE)
X_SYN = X_ASE4 + len(ASE_STATE)

# Recorded trajectory columns.
REC_COLS = ("t_s", "x_mm", "y_mm", "heading_rad", "speed_mm_s", "C_mM", "C_field_mM")
N_REC = len(REC_COLS)

# Levy control scalars and state.
LEVY_FIELDS = ("dt", "C_track", "tol", "s_min", "s_max", "speed")
LC_DT, LC_TRACK, LC_TOL, LC_SMIN, LC_SMAX, LC_V = range(len(LEVY_FIELDS))
LX_X, LX_Y, LX_H, LX_REM = range(4)

# Kernel status codes.
OK, UNSTABLE, BUFFER_FULL, NEED_DRAWS, SUCCESS = range(5)

# Motor markers.
LAST_NONE, LAST_N5, LAST_N6, LAST_N7 = 0, 5, 6, 7
