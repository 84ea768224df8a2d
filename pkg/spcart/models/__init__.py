# Typed models package
