# Germ cohomology engine app package
