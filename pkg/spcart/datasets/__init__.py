# Datasets package
