# Agents package 