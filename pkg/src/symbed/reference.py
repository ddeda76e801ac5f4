"""Published reference numbers for the bundled benchmark datasets.

Used only to report deltas in the `reproduce` command; tests never treat
these as ground truth beyond the documented acceptance bands.
"""

# name -> (nodes, undirected edges, weakly connected components, classes)
DATASET_STATS = {
    "ions": (1969, 16092, 326, 12),
    "cora": (2708, 5278, 78, 7),
    "citeseer": (3327, 4676, 438, 6),
    "bitcoin_alpha": (3783, 14124, 5, 20),
    "ppi": (3890, 38739, 35, 50),
    "wikipedia": (4777, 92517, 1, 40),
    "bitcoin": (5881, 21492, 4, 20),
    "blogcatalog": (10312, 333983, 1, 39),
    "coauthor_cs": (18333, 100227, 1, 15),
    "pubmed": (19717, 64041, 1, 3),
    "coauthor_phy": (34493, 282455, 1, 5),
}

# Aggregated micro F1 (mean, std) per method.
REFERENCE_MICRO_F1 = {
    "cora": {"random": (0.246, 0.021), "label_propagation": (0.834, 0.038),
             "fixed": (0.822, 0.052), "sdf": (0.826, 0.051)},
    "citeseer": {"random": (0.187, 0.007), "label_propagation": (0.657, 0.062),
                 "fixed": (0.666, 0.063), "sdf": (0.664, 0.066)},
    "ions": {"random": (0.383, 0.020), "label_propagation": (0.691, 0.051),
             "fixed": (0.712, 0.045), "sdf": (0.708, 0.047)},
    "bitcoin_alpha": {"random": (0.676, 0.013), "label_propagation": (0.701, 0.002),
                      "fixed": (0.709, 0.005), "sdf": (0.703, 0.003)},
    "ppi": {"random": (0.061, 0.003), "label_propagation": (0.066, 0.000),
            "fixed": (0.207, 0.041), "sdf": (0.210, 0.038)},
    "wikipedia": {"random": (0.394, 0.014), "label_propagation": (0.068, 0.000),
                  "fixed": (0.427, 0.014), "sdf": (0.404, 0.002)},
    "bitcoin": {"random": (0.670, 0.011), "label_propagation": (0.701, 0.003),
                "fixed": (0.716, 0.007), "sdf": (0.709, 0.007)},
    "blogcatalog": {"random": (0.139, 0.014), "label_propagation": (0.070, 0.000),
                    "fixed": (0.230, 0.021), "sdf": (0.226, 0.019)},
    "coauthor_cs": {"random": (0.215, 0.014), "label_propagation": (0.125, 0.000),
                    "fixed": (0.585, 0.131), "sdf": (0.854, 0.081)},
    "pubmed": {"random": (0.395, 0.003), "label_propagation": (0.399, 0.001),
               "fixed": (0.783, 0.033), "sdf": (0.821, 0.024)},
    "coauthor_phy": {"random": (0.505, 0.001), "label_propagation": (0.333, 0.000),
                     "fixed": (0.605, 0.061), "sdf": (0.887, 0.082)},
}

# Aggregated macro F1 (mean, std) per method.
REFERENCE_MACRO_F1 = {
    "cora": {"random": (0.117, 0.014), "label_propagation": (0.825, 0.038),
             "fixed": (0.811, 0.054), "sdf": (0.815, 0.054)},
    "citeseer": {"random": (0.157, 0.006), "label_propagation": (0.620, 0.060),
                 "fixed": (0.621, 0.066), "sdf": (0.623, 0.067)},
    "ions": {"random": (0.076, 0.005), "label_propagation": (0.333, 0.031),
             "fixed": (0.319, 0.053), "sdf": (0.312, 0.052)},
    "bitcoin_alpha": {"random": (0.270, 0.006), "label_propagation": (0.277, 0.004),
                      "fixed": (0.303, 0.009), "sdf": (0.283, 0.005)},
    "ppi": {"random": (0.046, 0.002), "label_propagation": (0.066, 0.000),
            "fixed": (0.142, 0.037), "sdf": (0.156, 0.037)},
    "wikipedia": {"random": (0.041, 0.003), "label_propagation": (0.059, 0.000),
                  "fixed": (0.050, 0.009), "sdf": (0.034, 0.001)},
    "bitcoin": {"random": (0.269, 0.004), "label_propagation": (0.287, 0.002),
                "fixed": (0.314, 0.013), "sdf": (0.293, 0.009)},
    "blogcatalog": {"random": (0.037, 0.004), "label_propagation": (0.068, 0.000),
                    "fixed": (0.067, 0.012), "sdf": (0.065, 0.011)},
    "coauthor_cs": {"random": (0.032, 0.009), "label_propagation": (0.120, 0.000),
                    "fixed": (0.451, 0.155), "sdf": (0.803, 0.109)},
    "pubmed": {"random": (0.295, 0.004), "label_propagation": (0.190, 0.000),
               "fixed": (0.742, 0.059), "sdf": (0.805, 0.032)},
    "coauthor_phy": {"random": (0.134, 0.000), "label_propagation": (0.309, 0.000),
                     "fixed": (0.381, 0.141), "sdf": (0.853, 0.118)},
}

DATASET_NAMES = tuple(sorted(DATASET_STATS))
