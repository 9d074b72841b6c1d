# Middleware package 