"""Published per-method percentages (overall table, temporal breakdown, HERD breakdown)."""

# AQ, TQ, static avg, OA, EA, alignment avg, temporal, TC, LS, ICP, ICS, clarity avg, HERD, overall
OVERALL = {
    'FreeNoise': (65.38, 71.34, 68.36, 63.28, 47.17, 55.23, 73.26, 71.32, 72.36, 71.53, 80.38, 73.90, 50.00, 64.15),
    'MEVG': (41.75, 18.33, 30.04, 64.66, 49.13, 56.90, 66.70, 45.38, 45.59, 46.67, 55.45, 48.27, 47.54, 49.89),
    'FreeLong': (58.31, 55.99, 57.15, 69.10, 52.97, 61.04, 66.57, 56.67, 59.17, 59.38, 67.29, 60.63, 57.65, 60.61),
    'FIFO-Diffusion': (65.72, 62.09, 63.91, 59.32, 45.27, 52.30, 75.58, 79.03, 79.97, 78.02, 86.25, 80.82, 49.76, 64.47),
    'DiTCtrl': (54.27, 62.13, 58.20, 71.70, 54.42, 63.06, 70.77, 59.90, 63.09, 60.87, 69.27, 63.28, 60.72, 63.21),
    'CausVid': (62.44, 89.54, 75.99, 73.30, 59.64, 66.47, 69.84, 57.43, 60.14, 61.42, 68.33, 61.83, 63.55, 67.54),
    'SkyReels-V2': (67.20, 80.18, 73.69, 70.98, 46.33, 58.66, 79.49, 71.39, 72.71, 71.18, 79.20, 73.62, 62.74, 69.64),
    'Vlogger': (49.16, 78.91, 64.04, 65.78, 23.68, 44.73, 66.07, 45.17, 46.22, 49.17, 55.42, 49.00, 58.59, 56.48),
    'VGoT': (85.50, 96.79, 91.15, 67.07, 42.83, 54.95, 71.21, 78.92, 78.13, 77.78, 84.31, 79.79, 63.74, 72.17),
}

# dynamic degree, motion smoothness, warping error, semantic consistency, temporal flickering,
# transition smoothness, human action, intra subject, intra background, inter subject, inter background, avg
TEMPORAL = {
    'FreeNoise': (27.64, 96.84, 91.41, 98.13, 95.65, 78.90, 28.63, 95.60, 97.82, 43.15, 52.09, 73.26),
    'MEVG': (8.72, 99.35, 99.33, 98.96, 99.20, 25.71, 23.30, 97.88, 98.95, 35.50, 46.80, 66.70),
    'FreeLong': (23.30, 98.41, 94.85, 98.50, 98.07, 18.24, 31.59, 91.16, 98.34, 37.41, 42.40, 66.57),
    'FIFO-Diffusion': (62.21, 96.29, 88.92, 97.44, 94.23, 73.49, 23.61, 94.37, 97.22, 45.93, 57.72, 75.58),
    'DiTCtrl': (32.26, 99.23, 99.11, 98.83, 98.92, 24.96, 44.61, 97.07, 98.76, 38.05, 46.65, 70.77),
    'CausVid': (40.67, 98.90, 97.45, 99.29, 98.41, 10.76, 48.15, 96.51, 99.22, 35.58, 43.26, 69.84),
    'SkyReels-V2': (77.41, 98.10, 92.99, 98.22, 96.06, 79.28, 47.91, 95.44, 98.03, 40.32, 50.60, 79.49),
    'Vlogger': (36.70, 95.35, 81.54, 96.12, 94.27, 27.03, 37.46, 90.31, 96.48, 34.28, 37.20, 66.07),
    'VGoT': (33.86, 99.12, 97.70, 99.43, 98.47, 27.25, 43.15, 96.66, 99.37, 39.89, 48.44, 71.21),
}

# emotional response, narrative flow, character development, visual style, themes,
# interpretive depth, overall impression, avg
HERD = {
    'FreeNoise': (65.28, 21.94, 31.04, 72.99, 49.31, 35.56, 73.89, 50.00),
    'MEVG': (58.82, 19.24, 22.99, 83.82, 46.18, 27.99, 73.75, 47.54),
    'FreeLong': (74.31, 25.83, 33.06, 84.03, 64.37, 37.92, 84.03, 57.65),
    'FIFO-Diffusion': (68.68, 24.58, 28.75, 73.89, 45.62, 34.10, 72.71, 49.76),
    'DiTCtrl': (75.56, 32.92, 37.01, 86.46, 67.01, 38.33, 87.78, 60.72),
    'CausVid': (80.07, 31.81, 39.44, 88.33, 72.57, 42.57, 90.07, 63.55),
    'SkyReels-V2': (77.57, 35.49, 41.46, 88.82, 68.47, 38.19, 89.17, 62.74),
    'Vlogger': (71.32, 28.54, 34.58, 90.35, 68.26, 29.37, 87.71, 58.59),
    'VGoT': (82.22, 25.83, 48.13, 88.47, 72.08, 41.11, 88.33, 63.74),
}
